#include "lipembed/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lipembed/random.hpp"

namespace lipembed {

namespace {

Matrix embed_block(const Matrix& block, int n, int at) {
  Matrix m = Matrix::Identity(n, n);
  m.block(at, at, block.rows(), block.cols()) = block;
  return m;
}

// Composite rotation of a reduction: each step contributes the orthogonal
// matrix [frame; direction^T] acting on the leading coordinates, so that the
// first target_dim coordinates of R x reproduce the iterated projection and
// the remaining ones carry the dropped heights. Sign-fixed to det +1.
Matrix reduction_rotation(const std::vector<ProjectionStep>& steps, int n) {
  Matrix r = Matrix::Identity(n, n);
  for (const ProjectionStep& s : steps) {
    const int d = s.direction.dim();
    Matrix o(d, d);
    o.topRows(d - 1) = s.frame;
    o.row(d - 1) = s.direction.vector().transpose();
    r = embed_block(o, n, 0) * r;
  }
  if (r.determinant() < 0.0) r.row(n - 1) = -r.row(n - 1);
  return r;
}

struct TameLift {
  std::vector<TameFactor> factors;
  Matrix reduced;  // survivors x l: leading block of the rotated samples
};

// Lifts a reduction to a tame map per the projection-extension lemma:
// one determinant-1 rotation followed by shears that null the heights.
TameLift lift_reduction(const ReductionResult& red, int l) {
  const int n = red.source_cloud.ambient_dim();
  const Matrix rot = reduction_rotation(red.steps, n);

  Matrix rotated(static_cast<int>(red.surviving_indices.size()), n);
  for (int i = 0; i < rotated.rows(); ++i)
    rotated.row(i) =
        (rot * red.source_cloud.points().row(red.surviving_indices[i]).transpose())
            .transpose();

  TameLift lift;
  lift.factors.push_back(LinearFactor(rot));
  if (l < n) {
    PointCloud rotated_cloud(rotated, red.source_cloud.intrinsic_dim(),
                             red.source_cloud.label() + "/rot");
    TameMap pi = projection_to_tame(rotated_cloud, l);
    for (const TameFactor& f : pi.factors()) lift.factors.push_back(f);
  }
  lift.reduced = rotated.leftCols(l);
  return lift;
}

// Cyclic shift of the first m coordinates (j -> j+1, m-1 -> 0) with one sign
// flip when needed to keep the determinant at 1.
Matrix shift_matrix(int n, int m) {
  Matrix p = Matrix::Identity(n, n);
  if (m <= 1) return p;
  p.block(0, 0, m, m).setZero();
  for (int j = 0; j + 1 < m; ++j) p(j + 1, j) = 1.0;
  p(0, m - 1) = 1.0;
  if (p.determinant() < 0.0) p.col(0) = -p.col(0);
  return p;
}

Matrix random_unimodular(int n, SeededRng& rng, int count) {
  Matrix m = Matrix::Identity(n, n);
  for (int t = 0; t < count; ++t) {
    const int i = static_cast<int>(rng.integer(n));
    int j = static_cast<int>(rng.integer(n - 1));
    if (j >= i) ++j;
    Matrix e = Matrix::Identity(n, n);
    e(i, j) = rng.uniform(-1.0, 1.0);
    m = e * m;
  }
  return m;
}

DistortionReport mixed_projection_distortion(const Matrix& graph, const Matrix& z,
                                             const Matrix& w, int r) {
  const int m = static_cast<int>(graph.rows());
  const int np = static_cast<int>(z.cols());
  DistortionReport rep;
  rep.lower = std::numeric_limits<double>::infinity();
  rep.upper = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double num = 0.0;
      for (int c = 0; c < r; ++c) num += (z(i, c) - z(j, c)) * (z(i, c) - z(j, c));
      for (int c = r; c < np; ++c) num += (w(i, c) - w(j, c)) * (w(i, c) - w(j, c));
      const double dt = std::sqrt(num);
      const double ds = (graph.row(i) - graph.row(j)).norm();
      const double ratio = dt / ds;
      if (ratio < rep.lower) {
        rep.lower = ratio;
        rep.witness_lower = {i, j};
      }
      if (ratio > rep.upper) {
        rep.upper = ratio;
        rep.witness_upper = {i, j};
      }
      if (dt == 0.0) rep.injective = false;
    }
  }
  return rep;
}

}  // namespace

SplitCoordinates split_coordinates(const PointCloud& graph_cloud, std::uint64_t seed,
                                   int trials) {
  const int n2 = graph_cloud.ambient_dim();
  if (n2 % 2 != 0)
    throw PreconditionError("split_coordinates: graph cloud dimension must be even");
  const int np = n2 / 2;
  const int m = graph_cloud.size();
  const Matrix& graph = graph_cloud.points();

  if (m == 1 || np == 0) {
    return SplitCoordinates{Matrix::Identity(np, np), Matrix::Identity(np, np), {}};
  }

  // Hypothesis: both coordinate-block projections are already injective.
  {
    const Matrix x = graph.leftCols(np);
    const Matrix y = graph.rightCols(np);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        if ((x.row(i) - x.row(j)).norm() == 0.0 || (y.row(i) - y.row(j)).norm() == 0.0)
          throw PreconditionError(
              "split_coordinates: a coordinate-block projection is not injective");
      }
  }

  SeededRng rng(mix_seed(seed, 0x51A7));
  double best_score = -1.0;
  int best_r = -1, best_wi = -1, best_wj = -1;

  for (int trial = 0; trial <= trials; ++trial) {
    Matrix s, t;
    if (trial == 0) {
      s = Matrix::Identity(np, np);
      t = Matrix::Identity(np, np);
    } else {
      const int count = np + trial % 3;
      s = random_unimodular(np, rng, count);
      t = random_unimodular(np, rng, count);
    }
    const Matrix z = graph.leftCols(np) * s.transpose();
    const Matrix w = graph.rightCols(np) * t.transpose();

    std::vector<DistortionReport> reports;
    reports.reserve(np + 1);
    double score = std::numeric_limits<double>::infinity();
    int worst_r = -1, wi = -1, wj = -1;
    for (int r = 0; r <= np; ++r) {
      DistortionReport rep = mixed_projection_distortion(graph, z, w, r);
      if (rep.lower < score) {
        score = rep.lower;
        worst_r = r;
        wi = rep.witness_lower.first;
        wj = rep.witness_lower.second;
      }
      reports.push_back(std::move(rep));
    }
    if (score >= kEpsilonMin) {
      return SplitCoordinates{std::move(s), std::move(t), std::move(reports)};
    }
    if (score > best_score) {
      best_score = score;
      best_r = worst_r;
      best_wi = wi;
      best_wj = wj;
    }
  }
  throw SearchError("split_coordinates: trial budget exhausted; worst projection q_" +
                        std::to_string(best_r) + " has lower bound " +
                        std::to_string(best_score),
                    best_score, {}, best_wi, best_wj);
}

namespace {

struct PipelineConfig {
  int k = 0;
  int l = 0;           // reduction target (2k+1 global, 2k local)
  bool local = false;
  std::vector<double> schedule;
  std::uint64_t seed = 0;
};

ExtensionResult run_pipeline(const SampledMap& f, const PipelineConfig& cfg) {
  const int n = f.source().ambient_dim();
  if (f.target().ambient_dim() != n)
    throw PreconditionError("extend_embedding: source and target dimensions differ");
  const int m = f.size();
  if (m >= 2 && !distortion(f).injective)
    throw PreconditionError("extend_embedding: f is not injective on samples");

  const int l = cfg.l;
  const int work = l + 1;  // the induction runs inside R^work

  // Reduce both clouds and lift the reductions to tame maps.
  ReductionResult red_x =
      cfg.local ? germ_whitney_reduce(f.source(), true, l, cfg.schedule, mix_seed(cfg.seed, 1))
                : whitney_reduce(f.source(), l, mix_seed(cfg.seed, 1));
  ReductionResult red_y =
      cfg.local ? germ_whitney_reduce(f.target(), true, l, cfg.schedule, mix_seed(cfg.seed, 2))
                : whitney_reduce(f.target(), l, mix_seed(cfg.seed, 2));

  TameLift lift_x = lift_reduction(red_x, l);
  TameLift lift_y = lift_reduction(red_y, l);

  std::vector<TameFactor> b_factors = lift_y.factors;
  b_factors.push_back(LinearFactor(shift_matrix(n, work)));
  TameMap a_map(lift_x.factors, n);
  TameMap b_map(std::move(b_factors), n);

  // Samples surviving both germ reductions.
  std::vector<int> active;
  {
    std::vector<char> in_x(m, 0), in_y(m, 0);
    for (int i : red_x.surviving_indices) in_x[i] = 1;
    for (int j : red_y.surviving_indices) in_y[j] = 1;
    for (int i = 0; i < m; ++i)
      if (in_x[i] && in_y[f.pairing()[i]]) active.push_back(i);
  }
  if (active.empty())
    throw SearchError("extend_embedding: no sample survives both reductions", 0.0);

  auto images_of = [&](const std::vector<int>& idx) {
    Matrix a(static_cast<int>(idx.size()), l), b(static_cast<int>(idx.size()), l);
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) {
      a.row(i) = a_map(f.source().point(idx[i])).head(l).transpose();
      b.row(i) = b_map(f.image(idx[i])).segment(1, l).transpose();
    }
    return std::make_pair(a, b);
  };

  // Coordinate split on the graph of the reduced map; in local mode shrink
  // the working radius when the violating pair lives outside the next ball.
  SplitCoordinates split{Matrix::Identity(l, l), Matrix::Identity(l, l), {}};
  std::optional<double> final_radius;
  if (cfg.local) {
    final_radius = std::min(red_x.final_radius.value_or(0.0), red_y.final_radius.value_or(0.0));
  }
  if (l > 0) {
    for (int attempt = 0;; ++attempt) {
      auto [a_pts, b_pts] = images_of(active);
      Matrix graph(static_cast<int>(active.size()), 2 * l);
      graph.leftCols(l) = a_pts;
      graph.rightCols(l) = b_pts;
      PointCloud graph_cloud(graph, cfg.k, f.source().label() + "/graph");
      try {
        split = split_coordinates(graph_cloud, mix_seed(cfg.seed, 3 + attempt), 64);
        break;
      } catch (const SearchError& err) {
        if (!cfg.local || attempt >= 20) throw;
        std::vector<double> rho(active.size());
        for (int i = 0; i < static_cast<int>(active.size()); ++i)
          rho[i] = graph.row(i).norm();
        const double rmax = *std::max_element(rho.begin(), rho.end());
        const double threshold = 0.5 * rmax;
        const double worst = std::max(err.witness_i >= 0 ? rho[err.witness_i] : 0.0,
                                      err.witness_j >= 0 ? rho[err.witness_j] : 0.0);
        if (worst <= threshold)
          throw;  // violation survives inside the smaller ball
        std::vector<int> shrunk;
        for (int i = 0; i < static_cast<int>(active.size()); ++i)
          if (rho[i] <= threshold) shrunk.push_back(active[i]);
        if (shrunk.empty() || static_cast<int>(shrunk.size()) == static_cast<int>(active.size()))
          throw;
        active = std::move(shrunk);
        final_radius = threshold;
      }
    }
  }

  auto [a_pts, b_pts] = images_of(active);
  const int ma = static_cast<int>(active.size());
  Matrix z = a_pts * split.S.transpose();
  Matrix g = b_pts * split.T.transpose();

  // Assemble the factor list, tracking the image of every active sample so
  // each induction shear interpolates against the true current state.
  std::vector<TameFactor> factors = lift_x.factors;
  if (l > 0) factors.push_back(LinearFactor(embed_block(split.S, n, 0)));

  std::vector<Vector> states(ma);
  {
    const TameMap prefix(factors, n);
    for (int i = 0; i < ma; ++i) states[i] = prefix(f.source().point(active[i]));
  }

  auto apply_factor = [&](TameFactor fac) {
    const TameMap one({fac}, n);
    for (Vector& s : states) s = one(s);
    factors.push_back(std::move(fac));
  };

  double max_drift = 0.0;
  for (int r = l; r >= 1; --r) {
    // Shear installing f'_r on axis r (0-based), reading every other
    // working coordinate.
    std::vector<int> inputs_a;
    for (int c = 0; c < work; ++c)
      if (c != r) inputs_a.push_back(c);
    Matrix dom_a(ma, work - 1);
    std::vector<double> val_a(ma);
    for (int i = 0; i < ma; ++i) {
      for (int c = 0; c < static_cast<int>(inputs_a.size()); ++c)
        dom_a(i, c) = states[i][inputs_a[c]];
      val_a[i] = g(i, r - 1);
    }
    apply_factor(ShearFactor{
        r, 1.0, inputs_a,
        SampledLipschitzFunction(PointCloud(dom_a, cfg.k, "stage_p"), std::move(val_a))});

    // Shear clearing z_r from axis r-1.
    std::vector<int> inputs_b;
    for (int c = 0; c < work; ++c)
      if (c != r - 1) inputs_b.push_back(c);
    Matrix dom_b(ma, work - 1);
    std::vector<double> val_b(ma);
    for (int i = 0; i < ma; ++i) {
      for (int c = 0; c < static_cast<int>(inputs_b.size()); ++c)
        dom_b(i, c) = states[i][inputs_b[c]];
      val_b[i] = states[i][r - 1];
    }
    apply_factor(ShearFactor{
        r - 1, -1.0, inputs_b,
        SampledLipschitzFunction(PointCloud(dom_b, cfg.k, "stage_q"), std::move(val_b))});

    // Stage exactness: states must now read (z_1..z_{r-1}, 0, g_r..g_l, ...).
    for (int i = 0; i < ma; ++i) {
      double drift = std::abs(states[i][r - 1]);
      for (int c = r; c <= l; ++c)
        drift = std::max(drift, std::abs(states[i][c] - g(i, c - 1)));
      for (int c = 0; c < r - 1; ++c)
        drift = std::max(drift, std::abs(states[i][c] - z(i, c)));
      max_drift = std::max(max_drift, drift);
    }
    if (max_drift > 1e-6)
      throw Error("extend_embedding: stage drift " + std::to_string(max_drift) +
                  " after installing stage " + std::to_string(r));
  }

  if (l > 0) {
    const Matrix t_inv = split.T.partialPivLu().inverse();
    apply_factor(LinearFactor(embed_block(t_inv, n, 1)));
  }
  const TameMap b_inverse = b_map.inverse();
  for (const TameFactor& fac : b_inverse.factors()) apply_factor(fac);

  // Interpolation check against the target samples.
  double max_norm = 0.0, err = 0.0;
  for (int i = 0; i < ma; ++i) {
    const Vector y = f.image(active[i]);
    max_norm = std::max(max_norm, y.norm());
    err = std::max(err, (states[i] - y).norm());
  }
  const double tolerance = 1e-8 * (1.0 + max_norm);
  if (err > tolerance)
    throw Error("extend_embedding: interpolation error " + std::to_string(err) +
                " exceeds tolerance " + std::to_string(tolerance));

  ExtensionResult result{TameMap(std::move(factors), n), false,     err,
                         DistortionReport{},             final_radius, active,
                         max_drift};
  result.isotopy_ready = result.F.isotopy_ready();
  if (ma >= 2) {
    Matrix fx(ma, n);
    for (int i = 0; i < ma; ++i) fx.row(i) = states[i].transpose();
    Matrix sx(ma, n);
    for (int i = 0; i < ma; ++i) sx.row(i) = f.source().points().row(active[i]);
    result.report = distortion(SampledMap::identity_pairing(
        PointCloud(sx, cfg.k, "X"), PointCloud(fx, cfg.k, "F(X)")));
  } else {
    result.report = DistortionReport{1.0, 1.0, {-1, -1}, {-1, -1}, true};
  }
  return result;
}

}  // namespace

ExtensionResult extend_embedding(const SampledMap& f, int k, ExtensionMode mode,
                                 std::uint64_t seed) {
  const int n = f.source().ambient_dim();
  const int required = mode == ExtensionMode::semialgebraic ? 2 * k + 2 : 4 * k + 2;
  if (n < required)
    throw PreconditionError("extend_embedding: ambient dimension " + std::to_string(n) +
                            " below required " + std::to_string(required));
  PipelineConfig cfg;
  cfg.k = k;
  cfg.l = 2 * k + 1;
  cfg.local = false;
  cfg.seed = seed;
  return run_pipeline(f, cfg);
}

ExtensionResult extend_embedding_local(const SampledMap& f, int k,
                                       std::vector<double> radius_schedule,
                                       std::uint64_t seed) {
  const int n = f.source().ambient_dim();
  if (n < 2 * k + 1)
    throw PreconditionError("extend_embedding_local: ambient dimension below 2k+1");

  // Both germs must contain the origin and the pairing must fix it.
  int origin = -1;
  for (int i = 0; i < f.size(); ++i)
    if (f.source().point(i).norm() <= 1e-15) origin = i;
  if (origin < 0 || f.image(origin).norm() > 1e-15)
    throw PreconditionError("extend_embedding_local: f must fix the origin");

  if (radius_schedule.empty()) radius_schedule = default_radius_schedule(f.source());
  PipelineConfig cfg;
  cfg.k = k;
  cfg.l = 2 * k;
  cfg.local = true;
  cfg.schedule = std::move(radius_schedule);
  cfg.seed = seed;
  return run_pipeline(f, cfg);
}

}  // namespace lipembed
