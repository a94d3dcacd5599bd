#include "lipembed/verify.hpp"

#include <cmath>
#include <limits>
#include <queue>

namespace lipembed {

GeodesicGraph::GeodesicGraph(PointCloud nodes, double rho)
    : nodes_(std::move(nodes)), rho_(rho) {
  if (rho_ <= 0.0) throw PreconditionError("GeodesicGraph: rho must be positive");
  const int m = nodes_.size();
  adjacency_.resize(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double d = (nodes_.points().row(i) - nodes_.points().row(j)).norm();
      if (d <= rho_) {
        adjacency_[i].push_back({j, d});
        adjacency_[j].push_back({i, d});
      }
    }
  const std::vector<double> dist = shortest_paths(0);
  for (double d : dist)
    if (std::isinf(d))
      throw PreconditionError("GeodesicGraph: disconnected at rho = " + std::to_string(rho_));
}

std::vector<double> GeodesicGraph::shortest_paths(int source) const {
  const int m = nodes_.size();
  std::vector<double> dist(m, std::numeric_limits<double>::infinity());
  dist[source] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adjacency_[u]) {
      if (dist[u] + w < dist[v]) {
        dist[v] = dist[u] + w;
        queue.push({dist[v], v});
      }
    }
  }
  return dist;
}

double default_rho(const PointCloud& cloud) {
  const int m = cloud.size();
  if (m < 2) throw PreconditionError("default_rho: need at least two points");
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      nearest = std::min(nearest, (cloud.points().row(i) - cloud.points().row(j)).norm());
    }
    worst = std::max(worst, nearest);
  }
  return 3.0 * worst;
}

double lne_ratio(const PointCloud& cloud, double rho) {
  if (cloud.size() < 2) throw PreconditionError("lne_ratio: need at least two points");
  GeodesicGraph graph(cloud, rho);
  double ratio = 1.0;
  for (int i = 0; i < cloud.size(); ++i) {
    const std::vector<double> dist = graph.shortest_paths(i);
    for (int j = i + 1; j < cloud.size(); ++j) {
      const double euclid = (cloud.points().row(i) - cloud.points().row(j)).norm();
      ratio = std::max(ratio, dist[j] / euclid);
    }
  }
  return ratio;
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw PreconditionError("hausdorff: ambient dimensions differ");
  auto one_sided = [](const PointCloud& p, const PointCloud& q) {
    double worst = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < q.size(); ++j)
        best = std::min(best, (p.points().row(i) - q.points().row(j)).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

CertificationReport certify_extension(const TameMap& F, const SampledMap& f,
                                      const GridSpec& grid) {
  if (F.dim() != f.source().ambient_dim())
    throw PreconditionError("certify_extension: map and sample dimensions differ");
  const int n = F.dim();
  const int m = f.size();

  CertificationReport report;

  double max_norm = 0.0;
  for (int i = 0; i < m; ++i) {
    const Vector y = f.image(i);
    max_norm = std::max(max_norm, y.norm());
    const double err = (F(f.source().point(i)) - y).norm();
    if (err > report.interpolation_error) {
      report.interpolation_error = err;
      report.worst_sample = i;
    }
  }
  report.interpolation_threshold = 1e-8 * (1.0 + max_norm);
  report.interpolation_ok = report.interpolation_error <= report.interpolation_threshold;

  // Inverse round-trip over the grid.
  long long cells = 1;
  for (int d = 0; d < n; ++d) {
    cells *= grid.steps;
    if (cells > 20'000'000)
      throw PreconditionError("certify_extension: grid too large");
  }
  Vector q(n);
  for (long long cell = 0; cell < cells; ++cell) {
    long long rest = cell;
    for (int d = 0; d < n; ++d) {
      const int idx = static_cast<int>(rest % grid.steps);
      rest /= grid.steps;
      q[d] = grid.steps == 1
                 ? grid.lo
                 : grid.lo + (grid.hi - grid.lo) * idx / (grid.steps - 1);
    }
    report.inverse_roundtrip_max =
        std::max(report.inverse_roundtrip_max, (F.invert(F(q)) - q).norm());
  }
  report.inverse_ok = report.inverse_roundtrip_max <= 1e-8;

  // Distortion of F restricted to the samples must agree with f's.
  if (m >= 2) {
    Matrix fx(m, n);
    for (int i = 0; i < m; ++i) fx.row(i) = F(f.source().point(i)).transpose();
    report.map_distortion = distortion(
        SampledMap::identity_pairing(f.source(), PointCloud(fx, f.source().intrinsic_dim(), "F(X)")));
    report.sample_distortion = distortion(f);
    const auto close = [](double a, double b) {
      return std::abs(a - b) <= 1e-6 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
    };
    report.distortion_consistent = close(report.map_distortion.lower,
                                         report.sample_distortion.lower) &&
                                   close(report.map_distortion.upper,
                                         report.sample_distortion.upper);
  } else {
    report.map_distortion = {1.0, 1.0, {-1, -1}, {-1, -1}, true};
    report.sample_distortion = report.map_distortion;
    report.distortion_consistent = true;
  }

  // Isotopy endpoints on the decomposed map.
  const TameMap flat = F.decomposed();
  report.isotopy_zero_is_identity = true;
  report.isotopy_one_matches_eval = true;
  const auto bitwise_equal = [](const Vector& a, const Vector& b) {
    return (a.array() == b.array()).all();
  };
  for (int i = 0; i < m; ++i) {
    const Vector x = f.source().point(i);
    if (!bitwise_equal(isotopy_eval(flat, 0.0, x), x))
      report.isotopy_zero_is_identity = false;
    if (!bitwise_equal(isotopy_eval(flat, 1.0, x), flat(x)))
      report.isotopy_one_matches_eval = false;
    if ((flat(x) - F(x)).norm() > 1e-8 * (1.0 + max_norm))
      report.isotopy_one_matches_eval = false;
  }

  return report;
}

}  // namespace lipembed
