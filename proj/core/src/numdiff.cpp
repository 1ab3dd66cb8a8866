#include "ofo/numdiff.hpp"

namespace ofo::numdiff {

Eigen::MatrixXd jacobian(const VectorMap& fn, const Eigen::VectorXd& x, double step) {
  Eigen::MatrixXd jac;
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = probe_step(x[j], step);
    probe[j] = x[j] + h;
    const Eigen::VectorXd plus = fn(probe);
    probe[j] = x[j] - h;
    const Eigen::VectorXd minus = fn(probe);
    probe[j] = x[j];
    if (j == 0) jac.resize(plus.size(), x.size());
    jac.col(j) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

Eigen::VectorXd gradient(const ScalarMap& fn, const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = probe_step(x[j], step);
    probe[j] = x[j] + h;
    const double plus = fn(probe);
    probe[j] = x[j] - h;
    const double minus = fn(probe);
    probe[j] = x[j];
    g[j] = (plus - minus) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd hessian_from_gradient(const VectorMap& grad, const Eigen::VectorXd& x, double step) {
  const Eigen::MatrixXd jac = jacobian(grad, x, step);
  return 0.5 * (jac + jac.transpose());
}

}  // namespace ofo::numdiff
