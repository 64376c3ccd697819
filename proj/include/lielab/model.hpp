#pragma once

#include "lielab/flow.hpp"

namespace lielab {

/// A Lie algebra with distribution and norm, and the two contracted families of
/// sub-Finsler metrics it generates.
class SubFinslerModel {
 public:
  SubFinslerModel(StructureTensor t, Subspace delta, NormSpec norm,
                  std::optional<Grading> asymptotic = std::nullopt, std::optional<int> truncation = std::nullopt)
      : tensor_(std::move(t)), delta_(std::move(delta)), norm_(norm, delta_), truncation_(truncation) {
    if (!delta_filtration(tensor_, delta_).bracket_generating)
      throw Error("distribution is not bracket generating");
    tangent_.emplace(tensor_, build_tangent_grading(tensor_, delta_), Side::tangent);
    if (nilpotency_step(tensor_)) {
      Grading g = asymptotic ? *asymptotic : build_asymptotic_grading(tensor_);
      asymptotic_.emplace(tensor_, std::move(g), Side::asymptotic);
    }
  }

  static SubFinslerModel from_file(const AlgebraFile& f) {
    std::optional<Grading> g;
    if (!f.grading.empty()) {
      Grading fg(f.grading);
      if (is_asymptotic(f.tensor, fg)) g = fg;
    }
    return SubFinslerModel(f.tensor, f.distribution ? *f.distribution : Subspace::full(f.tensor.dim()),
                           f.norm, g);
  }

  const StructureTensor& tensor() const { return tensor_; }
  const Subspace& distribution() const { return delta_; }
  const DistributionNorm& norm() const { return norm_; }
  bool has_asymptotic() const { return asymptotic_.has_value(); }
  const DeformedFamily& asymptotic() const {
    if (!asymptotic_) throw Error("asymptotic side needs a nilpotent algebra");
    return *asymptotic_;
  }
  const DeformedFamily& tangent() const { return *tangent_; }

  /// rho_eps: the metric pushed to large scales. eps = 0 is the asymptotic cone metric.
  Metric pansu(double eps) const {
    const auto& fam = asymptotic();
    Metric m = base_metric(fam, eps);
    const Eigen::MatrixXd gb = to_eigen(fam.grading().basis());
    const Eigen::MatrixXd gi = to_eigen(fam.grading().inverse_basis());
    Eigen::VectorXd scale(static_cast<Eigen::Index>(tensor_.dim()));
    for (std::size_t a = 0; a < tensor_.dim(); ++a) {
      const int w = fam.grading().weights()[a];
      scale(static_cast<Eigen::Index>(a)) = w == 1 ? 1.0 : std::pow(eps, w - 1);
    }
    m.velocity = gb * scale.asDiagonal() * gi * norm_.basis();
    return m;
  }

  /// d_eps: the metric blown up at small scales. eps = 0 is the tangent cone metric.
  Metric mitchell(double eps) const {
    Metric m = base_metric(*tangent_, eps);
    m.velocity = norm_.basis();
    return m;
  }

  Metric metric(Side side, double eps) const { return side == Side::asymptotic ? pansu(eps) : mitchell(eps); }

 private:
  Metric base_metric(const DeformedFamily& fam, double eps) const {
    if (eps < 0) throw Error("epsilon must be nonnegative");
    Metric m;
    const NumericTensor nt = fam.at_numeric(eps);
    int order;
    if (eps == 0 || nilpotency_step(tensor_)) {
      order = product_order(fam.cone(), std::nullopt);
      if (eps != 0) order = product_order(tensor_, std::nullopt);
    } else {
      order = product_order(tensor_, truncation_);
    }
    m.product = ProductPlan(nt, bch_table(order));
    m.norm = norm_;
    m.graded_basis = to_eigen(fam.grading().basis());
    m.graded_inverse = to_eigen(fam.grading().inverse_basis());
    m.weights = fam.grading().weights();
    return m;
  }

  StructureTensor tensor_;
  Subspace delta_;
  DistributionNorm norm_;
  std::optional<int> truncation_;
  std::optional<DeformedFamily> asymptotic_, tangent_;
};

}  // namespace lielab
