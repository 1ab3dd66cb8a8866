#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>

namespace ofo {

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;
using GradientFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using HessianFunction = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Phi_u(u) = beta_u u'u and Phi_y(y) = beta_y (y - y_ref)'(y - y_ref).
struct QuadraticCostData {
  double beta_u = 0.0;
  double beta_y = 0.0;
  Eigen::VectorXd y_ref;
};

/// Separable cost Phi(u, y) = Phi_u(u) + Phi_y(y).
struct CostModel {
  Eigen::Index input_dim = 0;
  Eigen::Index output_dim = 0;

  ScalarFunction phi_u;
  GradientFunction grad_phi_u;
  ScalarFunction phi_y;
  GradientFunction grad_phi_y;
  HessianFunction hess_phi_u;  // optional
  HessianFunction hess_phi_y;  // optional

  std::optional<QuadraticCostData> quadratic;

  void validate() const;

  /// Analytic Hessian when provided, otherwise differenced gradient.
  Eigen::MatrixXd hessian_u(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd hessian_y(const Eigen::VectorXd& y) const;

  double value(const Eigen::VectorXd& u, const Eigen::VectorXd& y) const { return phi_u(u) + phi_y(y); }

  /// Cost with Phi_u replaced by Phi_u + beta_bar ||u||^2.
  CostModel regularized(double beta_bar) const;
};

CostModel make_quadratic_cost(double beta_u, double beta_y, const Eigen::VectorXd& y_ref, Eigen::Index input_dim);

}  // namespace ofo
