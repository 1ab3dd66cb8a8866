#pragma once

#include <Eigen/Core>
#include <functional>

namespace ofo::numdiff {

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ScalarMap = std::function<double(const Eigen::VectorXd&)>;

/// Relative probe size h_i = step * (1 + |x_i|).
inline double probe_step(double x, double step) { return step * (1.0 + (x < 0 ? -x : x)); }

/// Central-difference Jacobian of `fn` at `x`.
Eigen::MatrixXd jacobian(const VectorMap& fn, const Eigen::VectorXd& x, double step = 1e-6);

/// Central-difference gradient of a scalar map.
Eigen::VectorXd gradient(const ScalarMap& fn, const Eigen::VectorXd& x, double step = 1e-6);

/// Symmetrised central-difference Jacobian of a gradient map (i.e. a Hessian).
Eigen::MatrixXd hessian_from_gradient(const VectorMap& grad, const Eigen::VectorXd& x,
                                      double step = 1e-5);

}  // namespace ofo::numdiff
