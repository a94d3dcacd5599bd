#pragma once

#include <vector>

#include "lipembed/geometry.hpp"
#include "lipembed/tame_map.hpp"

namespace lipembed {

// Neighborhood graph of a finite sample with Euclidean edge weights; used to
// approximate the inner (length) metric.
class GeodesicGraph {
 public:
  GeodesicGraph(PointCloud nodes, double rho);

  const PointCloud& nodes() const { return nodes_; }
  double rho() const { return rho_; }
  // Shortest path lengths from one node to all others.
  std::vector<double> shortest_paths(int source) const;

 private:
  PointCloud nodes_;
  double rho_ = 0.0;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

// 3x the largest nearest-neighbor spacing: connects the sample without
// shortcutting across folds.
double default_rho(const PointCloud& cloud);

// max over node pairs of graph distance / Euclidean distance; >= 1 always.
// Throws when the graph is disconnected at radius rho.
double lne_ratio(const PointCloud& cloud, double rho);

// Symmetric Hausdorff distance between finite samples, exact.
double hausdorff(const PointCloud& a, const PointCloud& b);

// Pass/fail bundle mechanizing the extension postconditions.
struct CertificationReport {
  double interpolation_error = 0.0;
  double interpolation_threshold = 0.0;
  bool interpolation_ok = false;
  int worst_sample = -1;

  double inverse_roundtrip_max = 0.0;
  bool inverse_ok = false;

  DistortionReport map_distortion;     // F on the source samples
  DistortionReport sample_distortion;  // f itself
  bool distortion_consistent = false;

  bool isotopy_zero_is_identity = false;
  bool isotopy_one_matches_eval = false;

  bool pass() const {
    return interpolation_ok && inverse_ok && distortion_consistent &&
           isotopy_zero_is_identity && isotopy_one_matches_eval;
  }
};

struct GridSpec {
  double lo = -10.0;
  double hi = 10.0;
  int steps = 20;  // points per axis
};

// Bundles interpolation error, inverse round-trip on the grid, sampled
// distortion agreement, and the isotopy endpoint checks into one report.
CertificationReport certify_extension(const TameMap& F, const SampledMap& f,
                                      const GridSpec& grid);

}  // namespace lipembed
