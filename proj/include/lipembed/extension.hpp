#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lipembed/projection.hpp"
#include "lipembed/tame_map.hpp"

namespace lipembed {

// Determinant-1 coordinate changes S, T making every mixed projection
// q_r(z, w) = (z_1..z_r, w_{r+1}..w_n') injective on the graph samples,
// together with the exhaustively verified distortion of each q_r.
struct SplitCoordinates {
  Matrix S;
  Matrix T;
  std::vector<DistortionReport> q_distortions;
};

enum class ExtensionMode { semialgebraic, plain };

// A tame ambient homeomorphism agreeing with a sampled embedding.
struct ExtensionResult {
  TameMap F;
  bool isotopy_ready = false;
  double interpolation_error = 0.0;
  DistortionReport report;             // F restricted to the source samples
  std::optional<double> final_radius;  // local mode
  std::vector<int> active_indices;     // samples the interpolation covers
  double max_stage_drift = 0.0;        // worst deviation from the staged states
};

// Randomized search over products of transvections. The identity is always
// tried first. graph_cloud lives in R^{2n'}; its two coordinate-block
// projections must already be injective on samples.
SplitCoordinates split_coordinates(const PointCloud& graph_cloud, std::uint64_t seed,
                                   int trials);

// Extends a sampled bi-Lipschitz embedding f to a tame map F of R^n with
// F = f on samples. Pipeline: reduce both clouds to R^{2k+1} and lift the
// reductions to tame maps, split the graph coordinates, then install one
// shear per induction stage. semialgebraic mode needs n >= 2k+2, plain mode
// n >= 4k+2; the computation is identical.
ExtensionResult extend_embedding(const SampledMap& f, int k, ExtensionMode mode,
                                 std::uint64_t seed);

// Germ-local variant (n >= 2k+1): reductions run in germ mode, and the
// coordinate split retries on a shrinking working radius when its violating
// pair lies outside the next ball. f must fix the origin.
ExtensionResult extend_embedding_local(const SampledMap& f, int k,
                                       std::vector<double> radius_schedule,
                                       std::uint64_t seed);

}  // namespace lipembed
