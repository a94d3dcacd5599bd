#include "lipembed/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lipembed/random.hpp"

namespace lipembed {

namespace {

// max_s |cos(angle(v, s))| over secant rows; 2.0 flags a degenerate v.
double max_abs_cos(const Matrix& secants, const Vector& v) {
  const double n = v.norm();
  if (n < 1e-9) return 2.0;
  if (secants.rows() == 0) return 0.0;
  return (secants * (v / n)).cwiseAbs().maxCoeff();
}

// Nelder-Mead on the ambient vector (normalized inside the objective).
Vector refine_direction(const Matrix& secants, const Vector& start, int eval_budget) {
  const int n = static_cast<int>(start.size());
  auto objective = [&](const Vector& v) { return max_abs_cos(secants, v); };

  std::vector<Vector> simplex;
  std::vector<double> value;
  simplex.reserve(n + 1);
  simplex.push_back(start);
  for (int i = 0; i < n; ++i) {
    Vector v = start;
    v[i] += 0.35;
    simplex.push_back(std::move(v));
  }
  for (const Vector& v : simplex) value.push_back(objective(v));
  int evals = n + 1;

  std::vector<int> order(n + 1);
  while (evals < eval_budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return value[a] < value[b]; });
    const int best = order[0];
    const int worst = order[n];
    const int second_worst = order[n - 1];
    if (value[worst] - value[best] < 1e-14) break;

    Vector centroid = Vector::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= n;

    const Vector reflected = centroid + (centroid - simplex[worst]);
    const double fr = objective(reflected);
    ++evals;
    if (fr < value[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = objective(expanded);
      ++evals;
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
    } else if (fr < value[second_worst]) {
      simplex[worst] = reflected;
      value[worst] = fr;
    } else {
      const Vector contracted = centroid + 0.5 * (simplex[worst] - centroid);
      const double fc = objective(contracted);
      ++evals;
      if (fc < value[worst]) {
        simplex[worst] = contracted;
        value[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
          value[i] = objective(simplex[i]);
          ++evals;
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (value[i] < value[best]) best = i;
  return simplex[best];
}

// Unit directions of all point pairs, one row each, no deduplication.
Matrix all_pair_directions(const Matrix& pts) {
  const int m = static_cast<int>(pts.rows());
  Matrix dirs(m * (m - 1) / 2, pts.cols());
  int row = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const Vector d = (pts.row(i) - pts.row(j)).transpose();
      dirs.row(row++) = d.transpose() / d.norm();
    }
  return dirs;
}

double min_sin_against(const Matrix& pair_dirs, const Vector& unit_dir) {
  if (pair_dirs.rows() == 0) return 1.0;
  const double c = (pair_dirs * unit_dir).cwiseAbs().maxCoeff();
  return std::sqrt(std::max(0.0, 1.0 - std::min(c, 1.0) * std::min(c, 1.0)));
}

}  // namespace

SampledMap ReductionResult::composite_map() const {
  Matrix src(static_cast<int>(surviving_indices.size()), source_cloud.ambient_dim());
  for (int i = 0; i < static_cast<int>(surviving_indices.size()); ++i)
    src.row(i) = source_cloud.points().row(surviving_indices[i]);
  PointCloud restricted(src, source_cloud.intrinsic_dim(), source_cloud.label());
  return SampledMap::identity_pairing(restricted, final_cloud);
}

std::pair<Direction, double> find_avoiding_direction(const SecantSet& secants,
                                                     int trials, std::uint64_t seed) {
  if (secants.size() == 0) {
    if (secants.ambient_dim < 1)
      throw PreconditionError("find_avoiding_direction: ambient dimension missing");
    Vector e1 = Vector::Zero(secants.ambient_dim);
    e1[0] = 1.0;
    return {Direction::canonical(e1), 1.0};
  }
  const int n = secants.ambient_dim;
  if (n < 2)
    throw PreconditionError("find_avoiding_direction: ambient dimension below 2");
  if (trials < 1) throw PreconditionError("find_avoiding_direction: trials must be >= 1");

  const Matrix mat = secants.matrix();
  const int eval_budget = 160 + 60 * n;

  Vector best_dir;
  double best_eps = -1.0;
  auto consider = [&](const Vector& start) {
    const Vector refined = refine_direction(mat, start, eval_budget);
    if (refined.norm() < 1e-9) return;
    const Vector unit = refined / refined.norm();
    const double eps = min_sin_against(mat, unit);
    if (eps > best_eps) {
      best_eps = eps;
      best_dir = unit;
    }
  };

  for (int i = 0; i < n; ++i) consider(Vector::Unit(n, i));
  SeededRng rng(seed);
  for (int t = 0; t < trials; ++t) consider(rng.unit_vector(n));

  if (best_eps < kEpsilonMin) {
    std::vector<double> payload(best_dir.data(), best_dir.data() + best_dir.size());
    throw SearchError("find_avoiding_direction: best candidate only reaches sin angle " +
                          std::to_string(best_eps),
                      best_eps, std::move(payload));
  }
  return {Direction::canonical(best_dir), best_eps};
}

Matrix projection_frame(const Direction& d) {
  const Vector& v = d.vector();
  const int n = d.dim();
  int pivot = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(v[i]) > std::abs(v[pivot])) pivot = i;

  Matrix frame(n - 1, n);
  int row = 0;
  for (int i = 0; i < n; ++i) {
    if (i == pivot) continue;
    Vector u = Vector::Unit(n, i);
    u -= v * v.dot(u);
    for (int k = 0; k < row; ++k) u -= frame.row(k).transpose() * frame.row(k).dot(u);
    const double norm = u.norm();
    if (norm < 1e-12)
      throw Error("projection_frame: Gram-Schmidt degenerated");
    frame.row(row++) = u.transpose() / norm;
  }
  return frame;
}

std::pair<PointCloud, SampledMap> project_cloud(const PointCloud& cloud,
                                                const Direction& direction) {
  if (direction.dim() != cloud.ambient_dim())
    throw PreconditionError("project_cloud: direction dimension mismatch");
  const Matrix frame = projection_frame(direction);
  Matrix projected = cloud.points() * frame.transpose();
  for (int i = 0; i < cloud.size(); ++i)
    for (int j = i + 1; j < cloud.size(); ++j)
      if ((projected.row(i) - projected.row(j)).norm() < 1e-12)
        throw PreconditionError("project_cloud: projection collapses samples " +
                                std::to_string(i) + " and " + std::to_string(j));
  PointCloud image(projected, cloud.intrinsic_dim(), cloud.label());
  SampledMap map = SampledMap::identity_pairing(cloud, image);
  return {std::move(image), std::move(map)};
}

namespace {

void fill_composite_bounds(ReductionResult& result) {
  const int m = static_cast<int>(result.surviving_indices.size());
  if (m < 2) {
    result.composite_lower = 1.0;
    result.composite_upper = 1.0;
    return;
  }
  const SampledMap map = result.composite_map();
  const DistortionReport rep = distortion(map);
  result.composite_lower = rep.lower;
  result.composite_upper = rep.upper;

  double product = 1.0;
  for (const ProjectionStep& s : result.steps) product *= s.epsilon;
  if (result.composite_lower < product * (1.0 - 1e-9))
    throw Error("reduction: composite lower bound fell below the epsilon product");
  if (result.composite_upper > 1.0 + 1e-9)
    throw Error("reduction: composite upper bound exceeds 1");
}

}  // namespace

ReductionResult whitney_reduce(const PointCloud& cloud, int target_dim,
                               std::uint64_t seed) {
  const int k = cloud.intrinsic_dim();
  if (target_dim < 2 * k + 1)
    throw PreconditionError("whitney_reduce: target dimension below 2k+1");
  if (cloud.ambient_dim() < target_dim)
    throw PreconditionError("whitney_reduce: cloud ambient dimension below target");

  std::vector<int> everyone(cloud.size());
  std::iota(everyone.begin(), everyone.end(), 0);

  ReductionResult result{{}, cloud, cloud, everyone, 1.0, 1.0, std::nullopt};
  PointCloud current = cloud;
  constexpr int kTrials = 8;
  int step_index = 0;
  while (current.ambient_dim() > target_dim) {
    const Matrix pair_dirs =
        current.size() >= 2 ? all_pair_directions(current.points()) : Matrix(0, current.ambient_dim());
    SecantSet secants = current.size() >= 2
                            ? secant_directions(current)
                            : SecantSet{{}, current.label(), current.ambient_dim()};
    auto [dir, eps_dedup] = find_avoiding_direction(secants, kTrials, mix_seed(seed, step_index));
    (void)eps_dedup;
    // Epsilon is re-measured against every pair, not just deduplicated
    // representatives, so the chained bound holds exactly.
    const double eps = min_sin_against(pair_dirs, dir.vector());
    if (eps < kEpsilonMin) {
      std::vector<double> payload(dir.vector().data(),
                                  dir.vector().data() + dir.dim());
      throw SearchError("whitney_reduce: epsilon below threshold on the full pair set",
                        eps, std::move(payload));
    }
    const Matrix frame = projection_frame(dir);
    auto [image, map] = project_cloud(current, dir);
    (void)map;
    result.steps.push_back({dir, eps, frame, image.ambient_dim()});
    current = std::move(image);
    ++step_index;
  }
  result.final_cloud = current;
  fill_composite_bounds(result);
  return result;
}

std::vector<double> default_radius_schedule(const PointCloud& cloud) {
  double r0 = 0.0;
  for (int i = 0; i < cloud.size(); ++i)
    r0 = std::max(r0, cloud.point(i).norm());
  if (r0 == 0.0) r0 = 1.0;
  std::vector<double> schedule;
  for (int j = 0; j <= 20; ++j) schedule.push_back(r0 * std::pow(2.0, -j));
  return schedule;
}

namespace {

SecantSet secants_of_subset(const PointCloud& cloud, const std::vector<int>& idx) {
  if (idx.size() < 2) return SecantSet{{}, cloud.label(), cloud.ambient_dim()};
  Matrix pts(static_cast<int>(idx.size()), cloud.ambient_dim());
  for (int i = 0; i < static_cast<int>(idx.size()); ++i)
    pts.row(i) = cloud.points().row(idx[i]);
  return secant_directions(PointCloud(pts, cloud.intrinsic_dim(), cloud.label()));
}

Matrix pair_directions_within(const Matrix& pts, const std::vector<double>& norms,
                              double radius) {
  std::vector<int> inside;
  for (int i = 0; i < static_cast<int>(norms.size()); ++i)
    if (norms[i] <= radius) inside.push_back(i);
  if (inside.size() < 2) return Matrix(0, pts.cols());
  Matrix sub(static_cast<int>(inside.size()), pts.cols());
  for (int i = 0; i < static_cast<int>(inside.size()); ++i)
    sub.row(i) = pts.row(inside[i]);
  return all_pair_directions(sub);
}

}  // namespace

GermSecantData collect_germ_secants(const PointCloud& cloud,
                                    const std::vector<double>& schedule) {
  if (schedule.empty())
    throw PreconditionError("collect_germ_secants: empty radius schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] < schedule[i - 1]) || schedule[i] <= 0.0)
      throw PreconditionError("collect_germ_secants: schedule must strictly decrease");

  std::vector<int> all;
  for (int i = 0; i < cloud.size(); ++i)
    if (cloud.point(i).norm() <= schedule.front()) all.push_back(i);

  // Limit ball: the smallest scheduled radius still holding a point pair.
  std::vector<int> limit;
  for (std::size_t j = schedule.size(); j-- > 0;) {
    std::vector<int> inside;
    for (int i = 0; i < cloud.size(); ++i)
      if (cloud.point(i).norm() <= schedule[j]) inside.push_back(i);
    if (inside.size() >= 2) {
      limit = std::move(inside);
      break;
    }
  }
  GermSecantData data;
  data.radius_schedule = schedule;
  data.full_directions = secants_of_subset(cloud, all);
  data.limit_directions = secants_of_subset(cloud, limit);
  return data;
}

ReductionResult germ_whitney_reduce(const PointCloud& cloud, bool origin_included,
                                    int target_dim, std::vector<double> radius_schedule,
                                    std::uint64_t seed) {
  const int k = cloud.intrinsic_dim();
  if (target_dim < 2 * k)
    throw PreconditionError("germ_whitney_reduce: target dimension below 2k");
  if (cloud.ambient_dim() < target_dim)
    throw PreconditionError("germ_whitney_reduce: cloud ambient dimension below target");
  if (radius_schedule.empty()) radius_schedule = default_radius_schedule(cloud);
  for (std::size_t i = 1; i < radius_schedule.size(); ++i)
    if (!(radius_schedule[i] < radius_schedule[i - 1]) || radius_schedule[i] <= 0.0)
      throw PreconditionError("germ_whitney_reduce: schedule must strictly decrease");

  if (origin_included) {
    bool found = false;
    for (int i = 0; i < cloud.size() && !found; ++i)
      if (cloud.point(i).norm() <= 1e-15) found = true;
    if (!found)
      throw PreconditionError("germ_whitney_reduce: cloud does not contain the origin");
  }

  // Working state: surviving original indices, their current images, and the
  // index into the radius schedule.
  std::vector<int> survivors;
  Matrix current;
  {
    std::vector<int> inside;
    for (int i = 0; i < cloud.size(); ++i)
      if (cloud.point(i).norm() <= radius_schedule.front()) inside.push_back(i);
    if (inside.empty())
      throw PreconditionError("germ_whitney_reduce: no sample inside the largest radius");
    survivors = inside;
    current.resize(static_cast<int>(inside.size()), cloud.ambient_dim());
    for (int i = 0; i < static_cast<int>(inside.size()); ++i)
      current.row(i) = cloud.points().row(inside[i]);
  }

  std::size_t ridx = 0;
  std::vector<ProjectionStep> steps;
  int step_index = 0;
  int dim = cloud.ambient_dim();
  while (dim > target_dim) {
    std::vector<double> norms(current.rows());
    for (int i = 0; i < current.rows(); ++i) norms[i] = current.row(i).norm();

    // Limit directions: pairs inside the smallest scheduled ball holding at
    // least two samples (the finite stand-in for the directions of secants
    // degenerating at the origin).
    SecantSet limit_secants{{}, cloud.label(), dim};
    for (std::size_t j = radius_schedule.size(); j-- > ridx;) {
      std::vector<int> limit_idx;
      for (int i = 0; i < current.rows(); ++i)
        if (norms[i] <= radius_schedule[j]) limit_idx.push_back(i);
      if (limit_idx.size() < 2) continue;
      Matrix sub(static_cast<int>(limit_idx.size()), dim);
      for (int i = 0; i < static_cast<int>(limit_idx.size()); ++i)
        sub.row(i) = current.row(limit_idx[i]);
      limit_secants = secant_directions(PointCloud(sub, k, cloud.label()));
      break;
    }

    // In the line, projection to a point cannot avoid any secant: the germ
    // must contract to a single sample. Otherwise search for an avoiding
    // direction as usual.
    Direction dir = Direction::canonical(Vector::Unit(dim, 0));
    double clearance = 2.0;  // unreachable: forces a pair-free radius
    if (dim >= 2 || limit_secants.size() == 0) {
      auto [found, limit_eps] =
          find_avoiding_direction(limit_secants, 8, mix_seed(seed, step_index));
      dir = found;
      // The margin to the limit set fixes the avoidance ball around the
      // chosen direction; shrink the working radius until no secant inside
      // it enters that ball.
      clearance = std::max(kEpsilonMin, 0.5 * limit_eps);
    }
    bool accepted = false;
    double eps_step = 1.0;
    for (std::size_t j = ridx; j < radius_schedule.size(); ++j) {
      const Matrix dirs = pair_directions_within(current, norms, radius_schedule[j]);
      const double eps = min_sin_against(dirs, dir.vector());
      if (dirs.rows() == 0 || eps >= clearance) {
        ridx = j;
        eps_step = eps;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::vector<double> payload(dir.vector().data(), dir.vector().data() + dir.dim());
      throw SearchError("germ_whitney_reduce: schedule exhausted before avoidance holds",
                        0.0, std::move(payload));
    }

    // Drop samples outside the accepted radius, then project.
    std::vector<int> keep;
    for (int i = 0; i < current.rows(); ++i)
      if (norms[i] <= radius_schedule[ridx]) keep.push_back(i);
    Matrix kept(static_cast<int>(keep.size()), dim);
    std::vector<int> kept_survivors(keep.size());
    for (int i = 0; i < static_cast<int>(keep.size()); ++i) {
      kept.row(i) = current.row(keep[i]);
      kept_survivors[i] = survivors[keep[i]];
    }

    const Matrix frame = projection_frame(dir);
    Matrix projected = kept * frame.transpose();
    for (int i = 0; i < projected.rows(); ++i)
      for (int j2 = i + 1; j2 < projected.rows(); ++j2)
        if ((projected.row(i) - projected.row(j2)).norm() < 1e-12)
          throw PreconditionError("germ_whitney_reduce: projection collapses samples " +
                                  std::to_string(kept_survivors[i]) + " and " +
                                  std::to_string(kept_survivors[j2]));

    steps.push_back({dir, eps_step, frame, dim - 1});
    survivors = std::move(kept_survivors);
    current = std::move(projected);
    dim -= 1;
    ++step_index;
  }

  ReductionResult result{std::move(steps),
                         cloud,
                         PointCloud(current, k, cloud.label()),
                         survivors,
                         1.0,
                         1.0,
                         radius_schedule[ridx]};
  fill_composite_bounds(result);
  return result;
}

}  // namespace lipembed
