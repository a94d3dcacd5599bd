#include "lipembed/tame_map.hpp"

#include <algorithm>
#include <cmath>

namespace lipembed {

namespace {

Vector gather(const Vector& x, const std::vector<int>& idx) {
  Vector out(static_cast<int>(idx.size()));
  for (int i = 0; i < static_cast<int>(idx.size()); ++i) out[i] = x[idx[i]];
  return out;
}

void validate_factor(const TameFactor& f, int dim) {
  if (const auto* s = std::get_if<ShearFactor>(&f)) {
    if (s->axis < 0 || s->axis >= dim)
      throw PreconditionError("TameMap: shear axis out of range");
    if (s->sign != 1.0 && s->sign != -1.0)
      throw PreconditionError("TameMap: shear sign must be +1 or -1");
    if (static_cast<int>(s->inputs.size()) != s->offset.domain().ambient_dim())
      throw PreconditionError("TameMap: shear inputs do not match offset domain");
    for (int i : s->inputs)
      if (i < 0 || i >= dim || i == s->axis)
        throw PreconditionError("TameMap: shear input index invalid");
  } else if (const auto* t = std::get_if<LinearShearFactor>(&f)) {
    if (t->row < 0 || t->row >= dim || t->coeffs.size() != dim)
      throw PreconditionError("TameMap: linear shear shape mismatch");
    if (t->coeffs[t->row] != 0.0)
      throw PreconditionError("TameMap: linear shear must not read its own row");
  } else {
    const auto& l = std::get<LinearFactor>(f);
    if (l.matrix().rows() != dim || l.matrix().cols() != dim)
      throw PreconditionError("TameMap: linear factor dimension mismatch");
  }
}

}  // namespace

LinearFactor::LinearFactor(Matrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() != matrix_.cols())
    throw PreconditionError("LinearFactor: matrix must be square");
  const double det = matrix_.determinant();
  if (std::abs(det - 1.0) > kDetTolerance)
    throw PreconditionError("LinearFactor: determinant differs from 1 by " +
                            std::to_string(std::abs(det - 1.0)));
  inverse_ = matrix_.partialPivLu().inverse();
}

TameMap::TameMap(std::vector<TameFactor> factors, int dim)
    : factors_(std::move(factors)), dim_(dim) {
  if (dim_ < 0) throw PreconditionError("TameMap: negative dimension");
  for (const TameFactor& f : factors_) validate_factor(f, dim_);
}

Vector TameMap::operator()(const Vector& x) const {
  if (x.size() != dim_) throw PreconditionError("TameMap: point dimension mismatch");
  Vector p = x;
  for (const TameFactor& f : factors_) {
    if (const auto* s = std::get_if<ShearFactor>(&f)) {
      p[s->axis] += s->sign * s->offset(gather(p, s->inputs));
    } else if (const auto* t = std::get_if<LinearShearFactor>(&f)) {
      p[t->row] += t->coeffs.dot(p);
    } else {
      p = std::get<LinearFactor>(f).matrix() * p;
    }
  }
  return p;
}

Vector TameMap::invert(const Vector& y) const {
  if (y.size() != dim_) throw PreconditionError("TameMap: point dimension mismatch");
  Vector p = y;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    if (const auto* s = std::get_if<ShearFactor>(&*it)) {
      p[s->axis] -= s->sign * s->offset(gather(p, s->inputs));
    } else if (const auto* t = std::get_if<LinearShearFactor>(&*it)) {
      p[t->row] -= t->coeffs.dot(p);
    } else {
      p = std::get<LinearFactor>(*it).inverse_matrix() * p;
    }
  }
  return p;
}

TameMap TameMap::inverse() const {
  std::vector<TameFactor> inv;
  inv.reserve(factors_.size());
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    if (const auto* s = std::get_if<ShearFactor>(&*it)) {
      ShearFactor flipped = *s;
      flipped.sign = -flipped.sign;
      inv.push_back(std::move(flipped));
    } else if (const auto* t = std::get_if<LinearShearFactor>(&*it)) {
      LinearShearFactor flipped = *t;
      flipped.coeffs = -flipped.coeffs;
      inv.push_back(std::move(flipped));
    } else {
      inv.push_back(LinearFactor(std::get<LinearFactor>(*it).inverse_matrix()));
    }
  }
  return TameMap(std::move(inv), dim_);
}

bool TameMap::isotopy_ready() const {
  for (const TameFactor& f : factors_)
    if (std::holds_alternative<LinearFactor>(f)) return false;
  return true;
}

TameMap TameMap::decomposed() const {
  std::vector<TameFactor> out;
  for (const TameFactor& f : factors_) {
    if (const auto* l = std::get_if<LinearFactor>(&f)) {
      for (LinearShearFactor& t : sl_decompose(l->matrix())) out.push_back(std::move(t));
    } else {
      out.push_back(f);
    }
  }
  return TameMap(std::move(out), dim_);
}

TameMap compose(const TameMap& first, const TameMap& second) {
  if (first.dim() != second.dim())
    throw PreconditionError("compose: dimension mismatch");
  std::vector<TameFactor> factors = first.factors();
  for (const TameFactor& f : second.factors()) factors.push_back(f);
  return TameMap(std::move(factors), first.dim());
}

std::vector<LinearShearFactor> sl_decompose(const Matrix& m) {
  if (m.rows() != m.cols()) throw PreconditionError("sl_decompose: matrix must be square");
  const int n = static_cast<int>(m.rows());
  const double det = m.determinant();
  if (std::abs(det - 1.0) > LinearFactor::kDetTolerance)
    throw PreconditionError("sl_decompose: matrix is not unimodular");

  // Gauss-Jordan reduction to the identity using only row transvections
  // (row_i += c * row_j, i != j). The input is the product of the inverse
  // operations in reverse order.
  Matrix a = m;
  struct Op {
    int i, j;
    double c;
  };
  std::vector<Op> ops;
  auto apply = [&](int i, int j, double c) {
    a.row(i) += c * a.row(j);
    ops.push_back({i, j, c});
  };

  for (int col = 0; col < n; ++col) {
    if (a(col, col) != 1.0) {
      // Choose the strongest entry below the diagonal as a helper row.
      int helper = -1;
      double best = 0.0;
      for (int r = col + 1; r < n; ++r)
        if (std::abs(a(r, col)) > best) {
          best = std::abs(a(r, col));
          helper = r;
        }
      if (helper < 0 && col + 1 < n) {
        // Column is zero below the diagonal; seed the next row from this one.
        apply(col + 1, col, 1.0);
        helper = col + 1;
        if (a(helper, col) == 0.0)
          throw PreconditionError("sl_decompose: singular column encountered");
      }
      if (helper >= 0) {
        apply(col, helper, (1.0 - a(col, col)) / a(helper, col));
      } else {
        // Last column: previous columns are identity, so det forces a 1 here.
        if (std::abs(a(col, col) - 1.0) > 1e-8)
          throw PreconditionError("sl_decompose: reduction lost unimodularity");
        a(col, col) = 1.0;
      }
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      if (a(r, col) != 0.0) apply(r, col, -a(r, col));
    }
  }

  // a is now the identity: ops_k ... ops_1 * m = I, so
  // m = inv(ops_1) ... inv(ops_k); factor lists apply left to right.
  std::vector<LinearShearFactor> factors;
  factors.reserve(ops.size());
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    LinearShearFactor f;
    f.row = it->i;
    f.coeffs = Vector::Zero(n);
    f.coeffs[it->j] = -it->c;
    factors.push_back(std::move(f));
  }
  return factors;
}

TameMap projection_to_tame_subset(const PointCloud& cloud, const std::vector<int>& kept) {
  const int n = cloud.ambient_dim();
  const int m = cloud.size();
  std::vector<char> is_kept(n, 0);
  for (int i : kept) {
    if (i < 0 || i >= n) throw PreconditionError("projection_to_tame: index out of range");
    if (is_kept[i]) throw PreconditionError("projection_to_tame: duplicate kept index");
    is_kept[i] = 1;
  }

  Matrix proj(m, static_cast<int>(kept.size()));
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < static_cast<int>(kept.size()); ++c)
      proj(i, c) = cloud.points()(i, kept[c]);

  // The projection must stay injective on samples; name the first collapsed
  // pair otherwise.
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((proj.row(i) - proj.row(j)).norm() < 1e-12)
        throw PreconditionError("projection_to_tame: projection collapses samples " +
                                std::to_string(i) + " and " + std::to_string(j));

  PointCloud domain(proj, std::min<int>(cloud.intrinsic_dim(), static_cast<int>(kept.size())),
                    cloud.label() + "/proj");
  std::vector<TameFactor> factors;
  for (int s = 0; s < n; ++s) {
    if (is_kept[s]) continue;
    std::vector<double> values(m);
    for (int i = 0; i < m; ++i) values[i] = cloud.points()(i, s);
    ShearFactor shear{s, -1.0, kept, SampledLipschitzFunction(domain, std::move(values))};
    factors.push_back(std::move(shear));
  }
  return TameMap(std::move(factors), n);
}

TameMap projection_to_tame(const PointCloud& cloud, int split) {
  if (split < 0 || split > cloud.ambient_dim())
    throw PreconditionError("projection_to_tame: split out of range");
  std::vector<int> kept(split);
  for (int i = 0; i < split; ++i) kept[i] = i;
  return projection_to_tame_subset(cloud, kept);
}

TameMap graph_transfer(const SampledMap& f, int source_subspace_dim) {
  const int n = f.source().ambient_dim();
  const int s = source_subspace_dim;
  if (f.target().ambient_dim() != n)
    throw PreconditionError("graph_transfer: source and target dimensions differ");
  if (s < 0 || s > n) throw PreconditionError("graph_transfer: bad subspace dimension");

  const Matrix& x = f.source().points();
  const int m = f.source().size();
  for (int i = 0; i < m; ++i) {
    if (x.row(i).tail(n - s).norm() > 1e-12)
      throw PreconditionError("graph_transfer: source not inside R^s x {0}");
    if (f.image(i).head(s).norm() > 1e-12)
      throw PreconditionError("graph_transfer: target not inside {0} x R^(n-s)");
  }
  if (m >= 2 && !distortion(f).injective)
    throw PreconditionError("graph_transfer: map is degenerate on samples");

  PointCloud base(x.leftCols(s), f.source().intrinsic_dim(), f.source().label() + "/base");
  std::vector<int> head_inputs(s);
  for (int i = 0; i < s; ++i) head_inputs[i] = i;

  // Graph installer: (x, 0) -> (x, f(x)).
  std::vector<TameFactor> factors;
  Matrix graph_pts(m, n);
  for (int i = 0; i < m; ++i) {
    graph_pts.row(i).head(s) = x.row(i).head(s);
    graph_pts.row(i).tail(n - s) = f.image(i).tail(n - s).transpose();
  }
  for (int j = s; j < n; ++j) {
    std::vector<double> values(m);
    for (int i = 0; i < m; ++i) values[i] = graph_pts(i, j);
    factors.push_back(
        ShearFactor{j, 1.0, head_inputs, SampledLipschitzFunction(base, std::move(values))});
  }

  // Graph projection extension: (x, f(x)) -> (0, f(x)).
  std::vector<int> kept(n - s);
  for (int i = 0; i < n - s; ++i) kept[i] = s + i;
  PointCloud graph_cloud(graph_pts, f.source().intrinsic_dim(), f.source().label() + "/graph");
  TameMap pi = projection_to_tame_subset(graph_cloud, kept);
  for (const TameFactor& factor : pi.factors()) factors.push_back(factor);

  return TameMap(std::move(factors), n);
}

Vector isotopy_eval(const TameMap& map, double t, const Vector& x) {
  if (t < 0.0 || t > 1.0) throw PreconditionError("isotopy_eval: t outside [0,1]");
  if (x.size() != map.dim()) throw PreconditionError("isotopy_eval: dimension mismatch");
  if (!map.isotopy_ready())
    throw PreconditionError("isotopy_eval: map has undecomposed linear factors");
  if (t == 0.0) return x;
  if (t == 1.0) return map(x);
  Vector p = x;
  for (const TameFactor& f : map.factors()) {
    if (const auto* s = std::get_if<ShearFactor>(&f)) {
      p[s->axis] += t * s->sign * s->offset(gather(p, s->inputs));
    } else {
      const auto& ls = std::get<LinearShearFactor>(f);
      p[ls.row] += t * ls.coeffs.dot(p);
    }
  }
  return p;
}

}  // namespace lipembed
