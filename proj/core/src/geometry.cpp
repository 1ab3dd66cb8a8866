#include "ofo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ofo/error.hpp"

namespace ofo {

void require_same_dimension(long expected, long actual, const std::string& what) {
  if (expected != actual) {
    std::ostringstream msg;
    msg << what << ": expected dimension " << expected << ", got " << actual;
    throw DimensionError(msg.str());
  }
}

Box::Box(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  require_same_dimension(lower_.size(), upper_.size(), "Box bounds");
  if (lower_.size() == 0) throw DimensionError("Box: dimension must be positive");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || !(lower_[i] <= upper_[i]) ||
        lower_[i] == std::numeric_limits<double>::infinity() ||
        upper_[i] == -std::numeric_limits<double>::infinity()) {
      std::ostringstream msg;
      msg << "Box: invalid bounds [" << lower_[i] << ", " << upper_[i] << "] at index " << i;
      throw DomainError(msg.str());
    }
  }
}

Box Box::unbounded(Eigen::Index dimension) {
  const double inf = std::numeric_limits<double>::infinity();
  return Box(Eigen::VectorXd::Constant(dimension, -inf), Eigen::VectorXd::Constant(dimension, inf));
}

Box Box::interval(double lower, double upper) {
  return Box(Eigen::VectorXd::Constant(1, lower), Eigen::VectorXd::Constant(1, upper));
}

Box Box::product(const Box& first, const Box& second) {
  Eigen::VectorXd lo(first.dimension() + second.dimension());
  Eigen::VectorXd hi(lo.size());
  lo << first.lower(), second.lower();
  hi << first.upper(), second.upper();
  return Box(std::move(lo), std::move(hi));
}

bool Box::is_compact() const { return lower_.allFinite() && upper_.allFinite(); }

bool Box::contains(const Eigen::VectorXd& point, double tolerance) const {
  require_same_dimension(dimension(), point.size(), "Box::contains");
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    if (!(point[i] >= lower_[i] - tolerance && point[i] <= upper_[i] + tolerance)) return false;
  }
  return true;
}

Eigen::VectorXd Box::clamp(const Eigen::VectorXd& point) const {
  require_same_dimension(dimension(), point.size(), "Box::clamp");
  return point.cwiseMax(lower_).cwiseMin(upper_);
}

Eigen::VectorXd Box::midpoint() const {
  Eigen::VectorXd mid(dimension());
  for (Eigen::Index i = 0; i < mid.size(); ++i) {
    const bool lo_finite = std::isfinite(lower_[i]);
    const bool hi_finite = std::isfinite(upper_[i]);
    if (lo_finite && hi_finite) {
      mid[i] = 0.5 * (lower_[i] + upper_[i]);
    } else if (lo_finite) {
      mid[i] = lower_[i];
    } else if (hi_finite) {
      mid[i] = upper_[i];
    } else {
      mid[i] = 0.0;
    }
  }
  return mid;
}

std::vector<Eigen::VectorXd> Box::corners(std::size_t max_count) const {
  std::vector<Eigen::VectorXd> out;
  if (!is_compact() || dimension() >= 63) return out;
  const std::size_t count = std::size_t{1} << dimension();
  if (count > max_count) return out;
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Eigen::VectorXd c(dimension());
    for (Eigen::Index i = 0; i < dimension(); ++i) {
      c[i] = (mask >> i) & 1U ? upper_[i] : lower_[i];
    }
    out.push_back(std::move(c));
  }
  return out;
}

Box Box::inflated(double fraction) const {
  const Eigen::VectorXd pad = fraction * width();
  Eigen::VectorXd lo = lower_;
  Eigen::VectorXd hi = upper_;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::isfinite(pad[i])) {
      lo[i] -= pad[i];
      hi[i] += pad[i];
    }
  }
  return Box(std::move(lo), std::move(hi));
}

std::vector<Eigen::VectorXd> Box::grid(int points_per_axis) const {
  if (!is_compact()) throw DomainError("Box::grid: box is not compact");
  if (points_per_axis < 1) throw DomainError("Box::grid: need at least one point per axis");
  const Eigen::Index d = dimension();
  std::size_t total = 1;
  for (Eigen::Index i = 0; i < d; ++i) total *= static_cast<std::size_t>(points_per_axis);

  auto coordinate = [&](Eigen::Index axis, int k) {
    if (points_per_axis == 1) return 0.5 * (lower_[axis] + upper_[axis]);
    const double frac = static_cast<double>(k) / (points_per_axis - 1);
    return k == points_per_axis - 1 ? upper_[axis] : lower_[axis] + frac * (upper_[axis] - lower_[axis]);
  };

  std::vector<Eigen::VectorXd> out;
  out.reserve(total);
  std::vector<int> index(static_cast<std::size_t>(d), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Eigen::VectorXd p(d);
    for (Eigen::Index i = 0; i < d; ++i) p[i] = coordinate(i, index[static_cast<std::size_t>(i)]);
    out.push_back(std::move(p));
    for (Eigen::Index i = 0; i < d; ++i) {
      if (++index[static_cast<std::size_t>(i)] < points_per_axis) break;
      index[static_cast<std::size_t>(i)] = 0;
    }
  }
  return out;
}

bool Box::operator==(const Box& other) const {
  return lower_.size() == other.lower_.size() && lower_ == other.lower_ && upper_ == other.upper_;
}

OrthantOrder::OrthantOrder(std::vector<int> signs) : signs_(std::move(signs)) {
  if (signs_.empty()) throw DimensionError("OrthantOrder: dimension must be positive");
  for (int s : signs_) {
    if (s != 1 && s != -1) throw DomainError("OrthantOrder: signs must be +1 or -1");
  }
}

OrthantOrder OrthantOrder::standard(Eigen::Index dimension) {
  return OrthantOrder(std::vector<int>(static_cast<std::size_t>(dimension), 1));
}

OrthantOrder OrthantOrder::reversed(Eigen::Index dimension) {
  return OrthantOrder(std::vector<int>(static_cast<std::size_t>(dimension), -1));
}

double OrthantOrder::margin(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  require_same_dimension(dimension(), x.size(), "OrthantOrder: x");
  require_same_dimension(dimension(), y.size(), "OrthantOrder: y");
  double worst = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    worst = std::min(worst, signs_[static_cast<std::size_t>(i)] * (y[i] - x[i]));
  }
  return worst;
}

Eigen::VectorXd project_tangent(const Eigen::VectorXd& point, const Eigen::VectorXd& direction,
                                const Box& box) {
  require_same_dimension(box.dimension(), point.size(), "project_tangent: point");
  require_same_dimension(box.dimension(), direction.size(), "project_tangent: direction");
  if (!box.contains(point, kBoxTolerance)) {
    throw DomainError("project_tangent: point lies outside the box");
  }
  const Eigen::VectorXd p = box.clamp(point);
  const Eigen::VectorXd& lo = box.lower();
  const Eigen::VectorXd& hi = box.upper();

  Eigen::VectorXd out(direction.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double v = direction[i];
    if (lo[i] == hi[i]) {
      out[i] = 0.0;
    } else if (p[i] <= lo[i]) {
      out[i] = std::max(0.0, v);
    } else if (p[i] >= hi[i]) {
      out[i] = std::min(0.0, v);
    } else {
      out[i] = v;
    }
  }
  return out;
}

bool orthant_leq(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const OrthantOrder& order) {
  return order.margin(x, y) >= 0.0;
}

double box_radius(const Box& box) {
  if (!box.is_compact()) throw DomainError("box_radius: box is unbounded");
  return std::max(box.lower().cwiseAbs().maxCoeff(), box.upper().cwiseAbs().maxCoeff());
}

}  // namespace ofo
