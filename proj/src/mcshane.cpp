#include "lipembed/mcshane.hpp"

#include <limits>

namespace lipembed {

double lipschitz_constant(const PointCloud& domain, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != domain.size())
    throw PreconditionError("lipschitz_constant: value count differs from point count");
  if (domain.size() < 2)
    throw PreconditionError("lipschitz_constant: need at least two points");
  const Matrix& pts = domain.points();
  double best = 0.0;
  for (int i = 0; i < domain.size(); ++i)
    for (int j = i + 1; j < domain.size(); ++j) {
      const double d = (pts.row(i) - pts.row(j)).norm();
      best = std::max(best, std::abs(values[i] - values[j]) / d);
    }
  return best;
}

SampledLipschitzFunction::SampledLipschitzFunction(PointCloud domain,
                                                   std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != domain_.size())
    throw PreconditionError("SampledLipschitzFunction: value count mismatch");
  constant_ = domain_.size() >= 2 ? lipschitz_constant(domain_, values_) : 0.0;
}

SampledLipschitzFunction::SampledLipschitzFunction(PointCloud domain,
                                                   std::vector<double> values,
                                                   double constant)
    : domain_(std::move(domain)), values_(std::move(values)), constant_(constant) {
  if (static_cast<int>(values_.size()) != domain_.size())
    throw PreconditionError("SampledLipschitzFunction: value count mismatch");
  if (constant_ < 0.0)
    throw PreconditionError("SampledLipschitzFunction: negative Lipschitz constant");
  // The data must actually be constant-Lipschitz; tiny slack for roundoff.
  const Matrix& pts = domain_.points();
  for (int i = 0; i < domain_.size(); ++i)
    for (int j = i + 1; j < domain_.size(); ++j) {
      const double d = (pts.row(i) - pts.row(j)).norm();
      if (std::abs(values_[i] - values_[j]) > constant_ * d * (1.0 + 1e-12) + 1e-300)
        throw PreconditionError(
            "SampledLipschitzFunction: data violates the declared constant");
    }
}

double SampledLipschitzFunction::upper_envelope(const Vector& query) const {
  if (query.size() != domain_.ambient_dim())
    throw PreconditionError("SampledLipschitzFunction: query dimension mismatch");
  const Matrix& pts = domain_.points();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < domain_.size(); ++i) {
    const double d = (pts.row(i).transpose() - query).norm();
    best = std::min(best, values_[i] + constant_ * d);
  }
  return best;
}

double SampledLipschitzFunction::lower_envelope(const Vector& query) const {
  if (query.size() != domain_.ambient_dim())
    throw PreconditionError("SampledLipschitzFunction: query dimension mismatch");
  const Matrix& pts = domain_.points();
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < domain_.size(); ++i) {
    const double d = (pts.row(i).transpose() - query).norm();
    best = std::max(best, values_[i] - constant_ * d);
  }
  return best;
}

double SampledLipschitzFunction::operator()(const Vector& query) const {
  return 0.5 * (upper_envelope(query) + lower_envelope(query));
}

}  // namespace lipembed
