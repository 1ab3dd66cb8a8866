#pragma once

#include <Eigen/Core>
#include <vector>

namespace ofo {

/// Left-continuous piecewise-constant signal on [0, horizon].
///
/// Segment k covers (b_{k-1}, b_k] with b_{-1} = 0 and b_K = horizon, so a
/// query exactly at a breakpoint returns the value of the segment on its left.
class Schedule {
 public:
  Schedule(std::vector<double> breakpoints, std::vector<Eigen::VectorXd> values, double horizon);

  static Schedule constant(Eigen::VectorXd value, double horizon);
  /// Equal-length segments cycling through `values` until `horizon`.
  static Schedule uniform(const std::vector<Eigen::VectorXd>& values, double segment_length, double horizon);

  std::size_t segment_count() const { return values_.size(); }
  std::size_t segment_at(double t) const;
  double segment_start(std::size_t k) const;
  double segment_end(std::size_t k) const;
  const Eigen::VectorXd& value(std::size_t k) const { return values_.at(k); }
  Eigen::VectorXd operator()(double t) const { return values_[segment_at(t)]; }

  double horizon() const { return horizon_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Eigen::VectorXd>& values() const { return values_; }

  /// Truncates or extends the last segment to a new horizon.
  Schedule with_horizon(double horizon) const;

  bool operator==(const Schedule& other) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Eigen::VectorXd> values_;
  double horizon_;
};

}  // namespace ofo
