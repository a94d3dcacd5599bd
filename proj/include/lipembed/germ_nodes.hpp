#pragma once

#include "lipembed/germ_map.hpp"

// Concrete germ-map nodes. Exposed so the JSON layer can serialize a map
// tree and rebuild it; library users normally stay on the factory functions.

namespace lipembed {

class ZeroFn final : public GermFn {
 public:
  double eval(double) const override { return 0.0; }
};

class PuiseuxFn final : public GermFn {
 public:
  explicit PuiseuxFn(PuiseuxBranch branch) : branch_(std::move(branch)) {}
  double eval(double u) const override { return branch_.eval(u); }
  const PuiseuxBranch& branch() const { return branch_; }

 private:
  PuiseuxBranch branch_;
};

class DiffFn final : public GermFn {
 public:
  DiffFn(GermFnPtr a, GermFnPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  double eval(double u) const override { return a_->eval(u) - b_->eval(u); }
  const GermFnPtr& a() const { return a_; }
  const GermFnPtr& b() const { return b_; }

 private:
  GermFnPtr a_, b_;
};

class ChartBranchFn final : public GermFn {
 public:
  ChartBranchFn(PuiseuxBranch branch, Eigen::Matrix2d chart)
      : branch_(std::move(branch)), chart_(std::move(chart)) {}
  double eval(double u) const override;
  const PuiseuxBranch& branch() const { return branch_; }
  const Eigen::Matrix2d& chart() const { return chart_; }

 private:
  PuiseuxBranch branch_;
  Eigen::Matrix2d chart_;
};

class StraightenTx final : public GermTransform {
 public:
  StraightenTx(GermFnPtr f, Rational alpha) : f_(std::move(f)), alpha_(alpha) {}
  Eigen::Vector2d fwd(const Eigen::Vector2d& p) const override;
  Eigen::Vector2d bwd(const Eigen::Vector2d& p) const override;
  const GermFnPtr& f() const { return f_; }
  const Rational& alpha() const { return alpha_; }

 private:
  GermFnPtr f_;
  Rational alpha_;
};

class MonomialShiftTx final : public GermTransform {
 public:
  explicit MonomialShiftTx(Rational alpha) : alpha_(alpha) {}
  Eigen::Vector2d fwd(const Eigen::Vector2d& p) const override;
  Eigen::Vector2d bwd(const Eigen::Vector2d& p) const override;
  const Rational& alpha() const { return alpha_; }

 private:
  Rational alpha_;
};

class LinearTx final : public GermTransform {
 public:
  explicit LinearTx(const Eigen::Matrix2d& m);
  Eigen::Vector2d fwd(const Eigen::Vector2d& p) const override { return m_ * p; }
  Eigen::Vector2d bwd(const Eigen::Vector2d& p) const override { return inv_ * p; }
  const Eigen::Matrix2d& matrix() const { return m_; }

 private:
  Eigen::Matrix2d m_, inv_;
};

class SeqTx final : public GermTransform {
 public:
  explicit SeqTx(std::vector<GermTransformPtr> stages) : stages_(std::move(stages)) {}
  Eigen::Vector2d fwd(const Eigen::Vector2d& p) const override {
    Eigen::Vector2d q = p;
    for (const auto& s : stages_) q = s->fwd(q);
    return q;
  }
  Eigen::Vector2d bwd(const Eigen::Vector2d& p) const override {
    Eigen::Vector2d q = p;
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) q = (*it)->bwd(q);
    return q;
  }
  const std::vector<GermTransformPtr>& stages() const { return stages_; }

 private:
  std::vector<GermTransformPtr> stages_;
};

class InverseTx final : public GermTransform {
 public:
  explicit InverseTx(GermTransformPtr inner) : inner_(std::move(inner)) {}
  Eigen::Vector2d fwd(const Eigen::Vector2d& p) const override { return inner_->bwd(p); }
  Eigen::Vector2d bwd(const Eigen::Vector2d& p) const override { return inner_->fwd(p); }
  const GermTransformPtr& inner() const { return inner_; }

 private:
  GermTransformPtr inner_;
};

}  // namespace lipembed
