#include "hddm/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace hddm {

Schedule Schedule::linear() { return Schedule({1.0, -1.0}, "linear"); }

Schedule Schedule::quadratic() {
  return Schedule({1.0, 0.0, -1.0}, "quadratic");
}

Schedule Schedule::power(int p) {
  if (p < 1) throw std::invalid_argument("schedule power must be >= 1");
  if (p == 1) return linear();
  if (p == 2) return quadratic();
  std::vector<double> c(static_cast<std::size_t>(p) + 1, 0.0);
  c[0] = 1.0;
  c[static_cast<std::size_t>(p)] = -1.0;
  return Schedule(std::move(c), "power:" + std::to_string(p));
}

Schedule Schedule::polynomial(std::vector<double> coeffs, std::string name) {
  if (coeffs.empty()) {
    throw std::invalid_argument("polynomial schedule needs coefficients");
  }
  return Schedule(std::move(coeffs), std::move(name));
}

Schedule Schedule::from_name(const std::string& name) {
  if (name == "linear") return linear();
  if (name == "quadratic") return quadratic();
  if (name.rfind("power:", 0) == 0) {
    return power(std::stoi(name.substr(6)));
  }
  throw std::invalid_argument("unknown schedule family '" + name + "'");
}

std::pair<double, double> Schedule::eval(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("schedule evaluated at t=" +
                                std::to_string(t) + " outside [0,1]");
  }
  // Horner, value and derivative together.
  double v = 0.0;
  double dv = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    dv = dv * t + v;
    v = v * t + *it;
  }
  return {v, dv};
}

double Schedule::conditional_ratio(double s, double t) const {
  if (!(0.0 <= s && s <= t && t <= 1.0)) {
    throw std::invalid_argument("conditional ratio needs 0 <= s <= t <= 1");
  }
  if (s == t) return 1.0;
  const double vs = value(s);
  if (vs <= 0.0) {
    throw std::domain_error("degenerate ratio: schedule value at s=" +
                            std::to_string(s) + " is zero");
  }
  return value(t) / vs;
}

void validate_schedules(const std::vector<Schedule>& schedules) {
  if (schedules.empty()) {
    throw std::invalid_argument("no schedules to validate");
  }
  constexpr int kGridPoints = 1000;
  constexpr double kTol = 1e-12;
  std::string problems;
  auto report = [&problems](const std::string& msg) {
    if (!problems.empty()) problems += "; ";
    problems += msg;
  };

  for (std::size_t k = 0; k < schedules.size(); ++k) {
    const Schedule& s = schedules[k];
    const std::string label =
        "schedule[" + std::to_string(k) + "] (" + s.name() + ")";
    if (std::abs(s.value(0.0) - 1.0) > kTol) {
      report(label + ": boundary violation, value(0) != 1");
    }
    if (std::abs(s.value(1.0)) > kTol) {
      report(label + ": boundary violation, value(1) != 0");
    }
    bool monotone = true;
    bool in_range = true;
    double prev = s.value(0.0);
    for (int i = 1; i <= kGridPoints; ++i) {
      const double t = static_cast<double>(i) / kGridPoints;
      const double v = s.value(t);
      if (v > prev + kTol) monotone = false;
      if (v < -kTol || v > 1.0 + kTol) in_range = false;
      prev = v;
    }
    if (!monotone) report(label + ": not monotonically decreasing");
    if (!in_range) report(label + ": value escapes [0,1]");
  }

  for (std::size_t k = 0; k + 1 < schedules.size(); ++k) {
    bool ordered = true;
    for (int i = 0; i <= kGridPoints; ++i) {
      const double t = static_cast<double>(i) / kGridPoints;
      if (schedules[k].value(t) > schedules[k + 1].value(t) + kTol) {
        ordered = false;
        break;
      }
    }
    if (!ordered) {
      report("ordering violation: schedule[" + std::to_string(k) + "] (" +
             schedules[k].name() + ") exceeds schedule[" +
             std::to_string(k + 1) + "] (" + schedules[k + 1].name() + ")");
    }
  }

  if (!problems.empty()) throw std::invalid_argument(problems);
}

}  // namespace hddm
