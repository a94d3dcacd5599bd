#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lipembed/geometry.hpp"

namespace lipembed {

// Direction search acceptance threshold: below this the candidate is treated
// as hitting the secant set.
inline constexpr double kEpsilonMin = 1e-6;

// One codimension-one projection: the avoided direction, the achieved
// minimum sin-angle against the secant set, and the orthonormal frame the
// image is expressed in (rows span the hyperplane orthogonal to direction).
struct ProjectionStep {
  Direction direction;
  double epsilon = 0.0;
  Matrix frame;  // (d-1) x d
  int resulting_dim = 0;
};

// Outcome of an iterated reduction. The composite distortion is re-verified
// exhaustively on all surviving sample pairs.
struct ReductionResult {
  std::vector<ProjectionStep> steps;
  PointCloud source_cloud;
  PointCloud final_cloud;
  std::vector<int> surviving_indices;  // into the source cloud
  double composite_lower = 1.0;
  double composite_upper = 1.0;
  std::optional<double> final_radius;  // germ mode only

  SampledMap composite_map() const;
};

// Secant data of a germ sample: all directions, plus the directions spanned
// by pairs inside the smallest scheduled ball (the stand-in for the limit
// directions at the origin).
struct GermSecantData {
  std::vector<double> radius_schedule;
  SecantSet limit_directions;
  SecantSet full_directions;
};

// Multi-start random search plus local refinement for a direction maximizing
// the minimum sin-angle to the secant set. Returns the direction and the
// achieved epsilon (re-checked exhaustively). Throws SearchError when the
// best candidate stays below kEpsilonMin.
std::pair<Direction, double> find_avoiding_direction(const SecantSet& secants,
                                                     int trials, std::uint64_t seed);

// Deterministic orthonormal frame of the hyperplane orthogonal to d:
// Gram-Schmidt on the standard basis with the dominant axis removed.
Matrix projection_frame(const Direction& d);

// Orthogonal projection onto the hyperplane orthogonal to `direction`,
// expressed in the frame above (ambient dimension drops by one). Throws when
// two samples collapse.
std::pair<PointCloud, SampledMap> project_cloud(const PointCloud& cloud,
                                                const Direction& direction);

// Iterated secants -> avoiding direction -> projection until the ambient
// dimension reaches target_dim (which must be >= 2k+1).
ReductionResult whitney_reduce(const PointCloud& cloud, int target_dim,
                               std::uint64_t seed);

// r0 * 2^-j for j = 0..20 with r0 the largest sample norm.
std::vector<double> default_radius_schedule(const PointCloud& cloud);

// Secant data for germ reductions at the given schedule.
GermSecantData collect_germ_secants(const PointCloud& cloud,
                                    const std::vector<double>& schedule);

// Germ-local variant: directions are chosen against the limit secants and
// the working radius shrinks along the schedule until the chosen direction
// clears every secant inside it. Samples outside the working radius are
// dropped; target_dim must be >= 2k.
ReductionResult germ_whitney_reduce(const PointCloud& cloud, bool origin_included,
                                    int target_dim, std::vector<double> radius_schedule,
                                    std::uint64_t seed);

}  // namespace lipembed
