#pragma once

#include <Eigen/Core>
#include <vector>

namespace ofo {

/// Axis-aligned box {x : lower <= x <= upper}. Entries of `lower` may be
/// -inf and entries of `upper` may be +inf.
class Box {
 public:
  Box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  static Box unbounded(Eigen::Index dimension);
  static Box interval(double lower, double upper);
  /// Cartesian product `first` x `second`.
  static Box product(const Box& first, const Box& second);

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::Index dimension() const { return lower_.size(); }

  bool is_compact() const;
  bool contains(const Eigen::VectorXd& point, double tolerance = 0.0) const;

  /// Euclidean projection onto the box (componentwise clamp).
  Eigen::VectorXd clamp(const Eigen::VectorXd& point) const;

  /// Componentwise centre. Unbounded coordinates map to the finite bound, or
  /// to 0 when both bounds are infinite.
  Eigen::VectorXd midpoint() const;
  Eigen::VectorXd width() const { return upper_ - lower_; }

  /// All 2^d vertices of a compact box, or an empty list when 2^d exceeds
  /// `max_count`.
  std::vector<Eigen::VectorXd> corners(std::size_t max_count = 64) const;

  /// Box grown by `fraction` of its width on every side.
  Box inflated(double fraction) const;

  /// Tensor grid with `points_per_axis` points per coordinate (endpoints
  /// included). Requires a compact box.
  std::vector<Eigen::VectorXd> grid(int points_per_axis) const;

  bool operator==(const Box& other) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Orthant order induced by a sign pattern: x >= y iff signs[i]*(x[i]-y[i]) >= 0.
class OrthantOrder {
 public:
  explicit OrthantOrder(std::vector<int> signs);

  static OrthantOrder standard(Eigen::Index dimension);
  static OrthantOrder reversed(Eigen::Index dimension);

  const std::vector<int>& signs() const { return signs_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(signs_.size()); }

  /// Smallest signed gap min_i signs[i]*(y[i]-x[i]); x <= y iff it is >= 0.
  double margin(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  bool operator==(const OrthantOrder& other) const = default;

 private:
  std::vector<int> signs_;
};

/// Points may sit this far outside a box (integration drift) before an
/// operation rejects them.
inline constexpr double kBoxTolerance = 1e-12;

/// Projection of `direction` onto the tangent cone of `box` at `point`.
/// Interior coordinates pass through; lower faces keep max{0, v_i}; upper
/// faces keep min{0, v_i}; degenerate coordinates (lower == upper) give 0.
Eigen::VectorXd project_tangent(const Eigen::VectorXd& point, const Eigen::VectorXd& direction,
                                const Box& box);

/// True iff x <= y under `order`, i.e. y - x lies in the orthant.
bool orthant_leq(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const OrthantOrder& order);

/// Largest absolute bound max_i max{|lower_i|, |upper_i|} of a compact box.
double box_radius(const Box& box);

}  // namespace ofo
