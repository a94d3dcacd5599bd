#pragma once

#include <vector>

#include "lipembed/geometry.hpp"

namespace lipembed {

// Exact max over pairs of |values[i]-values[j]| / |x_i-x_j|.
double lipschitz_constant(const PointCloud& domain, const std::vector<double>& values);

// A scalar Lipschitz function known on finitely many points, evaluable
// anywhere via the midpoint of the McShane/Whitney envelopes:
//
//   upper(q) = min_y ( f(y) + L |q - y| )
//   lower(q) = max_y ( f(y) - L |q - y| )
//
// The midpoint agrees with the data exactly on domain points, is L-Lipschitz,
// and is odd in f, which keeps forward/backward shear constructions mirror
// images of each other.
class SampledLipschitzFunction {
 public:
  // L defaults to the exhaustive pairwise constant.
  SampledLipschitzFunction(PointCloud domain, std::vector<double> values);
  SampledLipschitzFunction(PointCloud domain, std::vector<double> values, double constant);

  const PointCloud& domain() const { return domain_; }
  const std::vector<double>& values() const { return values_; }
  double constant() const { return constant_; }

  double upper_envelope(const Vector& query) const;
  double lower_envelope(const Vector& query) const;
  double operator()(const Vector& query) const;

 private:
  PointCloud domain_;
  std::vector<double> values_;
  double constant_ = 0.0;
};

inline double mcshane_extend(const SampledLipschitzFunction& f, const Vector& query) {
  return f(query);
}

}  // namespace lipembed
