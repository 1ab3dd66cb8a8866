#include "ofo/cost.hpp"

#include <stdexcept>

#include "ofo/error.hpp"
#include "ofo/numdiff.hpp"

namespace ofo {

void CostModel::validate() const {
  if (input_dim <= 0 || output_dim <= 0) throw DimensionError("CostModel: dimensions must be positive");
  if (!phi_u || !grad_phi_u || !phi_y || !grad_phi_y) {
    throw std::invalid_argument("CostModel: value and gradient evaluators are required");
  }
}

Eigen::MatrixXd CostModel::hessian_u(const Eigen::VectorXd& u) const {
  if (hess_phi_u) return hess_phi_u(u);
  return numdiff::hessian_from_gradient(grad_phi_u, u);
}

Eigen::MatrixXd CostModel::hessian_y(const Eigen::VectorXd& y) const {
  if (hess_phi_y) return hess_phi_y(y);
  return numdiff::hessian_from_gradient(grad_phi_y, y);
}

CostModel CostModel::regularized(double beta_bar) const {
  if (beta_bar < 0) throw DomainError("CostModel::regularized: beta_bar must be nonnegative");
  CostModel out = *this;
  out.phi_u = [base = phi_u, beta_bar](const Eigen::VectorXd& u) { return base(u) + beta_bar * u.squaredNorm(); };
  out.grad_phi_u = [base = grad_phi_u, beta_bar](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return base(u) + 2.0 * beta_bar * u;
  };
  if (hess_phi_u) {
    out.hess_phi_u = [base = hess_phi_u, beta_bar](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
      return base(u) + 2.0 * beta_bar * Eigen::MatrixXd::Identity(u.size(), u.size());
    };
  }
  if (out.quadratic) out.quadratic->beta_u += beta_bar;
  return out;
}

CostModel make_quadratic_cost(double beta_u, double beta_y, const Eigen::VectorXd& y_ref, Eigen::Index input_dim) {
  if (beta_u < 0 || beta_y < 0) throw DomainError("make_quadratic_cost: weights must be nonnegative");
  const Eigen::Index p = y_ref.size();
  CostModel cost;
  cost.input_dim = input_dim;
  cost.output_dim = p;
  cost.phi_u = [beta_u](const Eigen::VectorXd& u) { return beta_u * u.squaredNorm(); };
  cost.grad_phi_u = [beta_u](const Eigen::VectorXd& u) -> Eigen::VectorXd { return 2.0 * beta_u * u; };
  cost.hess_phi_u = [beta_u](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
    return 2.0 * beta_u * Eigen::MatrixXd::Identity(u.size(), u.size());
  };
  cost.phi_y = [beta_y, y_ref](const Eigen::VectorXd& y) { return beta_y * (y - y_ref).squaredNorm(); };
  cost.grad_phi_y = [beta_y, y_ref](const Eigen::VectorXd& y) -> Eigen::VectorXd { return 2.0 * beta_y * (y - y_ref); };
  cost.hess_phi_y = [beta_y, p](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return 2.0 * beta_y * Eigen::MatrixXd::Identity(p, p);
  };
  cost.quadratic = QuadraticCostData{beta_u, beta_y, y_ref};
  cost.validate();
  return cost;
}

}  // namespace ofo
