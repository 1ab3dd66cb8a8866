#include "ofo/schedule.hpp"

#include <algorithm>

#include "ofo/error.hpp"

namespace ofo {

Schedule::Schedule(std::vector<double> breakpoints, std::vector<Eigen::VectorXd> values, double horizon)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), horizon_(horizon) {
  if (!(horizon_ > 0)) throw DomainError("Schedule: horizon must be positive");
  if (values_.size() != breakpoints_.size() + 1) {
    throw DimensionError("Schedule: need exactly one more value than breakpoints");
  }
  double previous = 0.0;
  for (double b : breakpoints_) {
    if (!(b > previous)) throw DomainError("Schedule: breakpoints must be strictly increasing and positive");
    previous = b;
  }
  if (!(previous < horizon_)) throw DomainError("Schedule: breakpoints must lie before the horizon");
  for (const Eigen::VectorXd& v : values_) {
    require_same_dimension(values_.front().size(), v.size(), "Schedule values");
  }
}

Schedule Schedule::constant(Eigen::VectorXd value, double horizon) {
  return Schedule({}, {std::move(value)}, horizon);
}

Schedule Schedule::uniform(const std::vector<Eigen::VectorXd>& values, double segment_length, double horizon) {
  if (values.empty()) throw DimensionError("Schedule::uniform: no values");
  if (!(segment_length > 0)) throw DomainError("Schedule::uniform: segment length must be positive");
  std::vector<double> breaks;
  std::vector<Eigen::VectorXd> vals{values.front()};
  for (std::size_t k = 1; k * segment_length < horizon * (1.0 - 1e-12); ++k) {
    breaks.push_back(static_cast<double>(k) * segment_length);
    vals.push_back(values[k % values.size()]);
  }
  return Schedule(std::move(breaks), std::move(vals), horizon);
}

std::size_t Schedule::segment_at(double t) const {
  // Number of breakpoints strictly below t.
  return static_cast<std::size_t>(std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t) -
                                  breakpoints_.begin());
}

double Schedule::segment_start(std::size_t k) const { return k == 0 ? 0.0 : breakpoints_.at(k - 1); }

double Schedule::segment_end(std::size_t k) const {
  return k < breakpoints_.size() ? breakpoints_[k] : horizon_;
}

Schedule Schedule::with_horizon(double horizon) const {
  std::vector<double> breaks;
  std::vector<Eigen::VectorXd> vals{values_.front()};
  for (std::size_t k = 0; k < breakpoints_.size() && breakpoints_[k] < horizon; ++k) {
    breaks.push_back(breakpoints_[k]);
    vals.push_back(values_[k + 1]);
  }
  return Schedule(std::move(breaks), std::move(vals), horizon);
}

bool Schedule::operator==(const Schedule& other) const {
  if (horizon_ != other.horizon_ || breakpoints_ != other.breakpoints_ || values_.size() != other.values_.size()) {
    return false;
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k].size() != other.values_[k].size() || values_[k] != other.values_[k]) return false;
  }
  return true;
}

}  // namespace ofo
