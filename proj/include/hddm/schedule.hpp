#ifndef HDDM_SCHEDULE_HPP
#define HDDM_SCHEDULE_HPP

#include <string>
#include <utility>
#include <vector>

namespace hddm {

/// Noise schedule: a monotone decreasing polynomial on [0,1] with value 1 at
/// t=0 and 0 at t=1. All built-in families are polynomials, so values and
/// derivatives are analytic.
class Schedule {
 public:
  static Schedule linear();     // 1 - t
  static Schedule quadratic();  // 1 - t^2
  static Schedule power(int p);  // 1 - t^p, p >= 1
  static Schedule polynomial(std::vector<double> coeffs,
                             std::string name = "polynomial");

  /// Resolves "linear", "quadratic" or "power:<p>".
  static Schedule from_name(const std::string& name);

  /// Value and derivative at t; throws if t is outside [0,1].
  std::pair<double, double> eval(double t) const;
  double value(double t) const { return eval(t).first; }
  double derivative(double t) const { return eval(t).second; }

  /// value(t) / value(s) for 0 <= s <= t <= 1. Defined as 1 when s == t.
  /// Throws when value(s) == 0 and t > s (degenerate ratio).
  double conditional_ratio(double s, double t) const;

  const std::string& name() const { return name_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  bool operator==(const Schedule&) const = default;

 private:
  Schedule(std::vector<double> coeffs, std::string name)
      : coeffs_(std::move(coeffs)), name_(std::move(name)) {}

  std::vector<double> coeffs_;  // value(t) = sum_k coeffs_[k] t^k
  std::string name_;
};

/// Checks monotonicity, boundary conditions, and pairwise ordering
/// schedules[0] <= schedules[1] <= ... on a 1000-point grid plus endpoints.
/// Throws std::invalid_argument naming every violated property.
void validate_schedules(const std::vector<Schedule>& schedules);

}  // namespace hddm

#endif  // HDDM_SCHEDULE_HPP
