#include "robustdiff/losses.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace robustdiff {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("loss delta must be positive and finite");
  }
}

// Ratios beyond this are handled with the linear asymptote so (x/delta)^2
// cannot overflow.
constexpr double kLinearRegime = 1e8;

double pseudo_huber_scalar(double x, double delta) {
  const double r = x / delta;
  if (std::abs(r) > kLinearRegime) return delta * std::abs(x) - delta * delta;
  return x * x / (1.0 + std::sqrt(1.0 + r * r));
}

double pseudo_huber_grad_scalar(double x, double delta) {
  const double r = x / delta;
  if (std::abs(r) > kLinearRegime) return (x > 0.0 ? delta : -delta);
  return x / std::sqrt(1.0 + r * r);
}

double diffusers_scalar(double x, double c) {
  if (std::abs(x) > kLinearRegime * c) return std::abs(x) - c;
  return x * x / (std::sqrt(x * x + c * c) + c);
}

double diffusers_grad_scalar(double x, double c) {
  if (std::abs(x) > kLinearRegime * c) return (x > 0.0 ? 1.0 : -1.0);
  return x / std::sqrt(x * x + c * c);
}

double huber_scalar(double x, double delta) {
  const double ax = std::abs(x);
  if (ax <= delta) return 0.5 * x * x;
  return delta * (ax - 0.5 * delta);
}

double huber_grad_scalar(double x, double delta) {
  if (std::abs(x) <= delta) return x;
  return (x > 0.0 ? delta : -delta);
}

}  // namespace

double delta_at(const DeltaSchedule& schedule, double t) {
  check_delta(schedule.delta0);
  if (!(schedule.horizon > 0.0)) {
    throw std::invalid_argument("schedule horizon must be positive");
  }
  if (!(t >= 0.0 && t <= schedule.horizon)) {
    throw std::invalid_argument("delta_at: t outside [0, T]");
  }
  switch (schedule.kind) {
    case ScheduleKind::Constant:
      return schedule.delta0;
    case ScheduleKind::ExpDecrease:
      return std::exp(std::log(schedule.delta0) * (t / schedule.horizon));
    case ScheduleKind::ExpIncrease: {
      // Time reversal of the decreasing schedule, evaluated literally so the
      // identity delta_inc(t) == delta_dec(T - t) holds bit-for-bit.
      DeltaSchedule reversed = schedule;
      reversed.kind = ScheduleKind::ExpDecrease;
      return delta_at(reversed, schedule.horizon - t);
    }
  }
  throw std::logic_error("delta_at: unknown schedule kind");
}

double huber(const Vector& residual, double delta) {
  check_delta(delta);
  double acc = 0.0;
  for (double x : residual) acc += huber_scalar(x, delta);
  return acc;
}

double pseudo_huber(const Vector& residual, double delta) {
  check_delta(delta);
  double acc = 0.0;
  for (double x : residual) acc += pseudo_huber_scalar(x, delta);
  return acc;
}

double pseudo_huber_diffusers(const Vector& residual, double c) {
  check_delta(c);
  double acc = 0.0;
  for (double x : residual) acc += diffusers_scalar(x, c);
  return acc;
}

LossEval loss_value_and_grad(const LossSpec& spec, const Vector& residual, double t) {
  require_finite(residual, "loss residual");
  LossEval out;
  out.grad.resize(residual.size());
  if (spec.kind == LossKind::L2) {
    for (std::size_t i = 0; i < residual.size(); ++i) {
      out.value += residual[i] * residual[i];
      out.grad[i] = 2.0 * residual[i];
    }
    return out;
  }
  const double delta = delta_at(spec.schedule, t);
  switch (spec.kind) {
    case LossKind::Huber:
      for (std::size_t i = 0; i < residual.size(); ++i) {
        out.value += huber_scalar(residual[i], delta);
        out.grad[i] = huber_grad_scalar(residual[i], delta);
      }
      break;
    case LossKind::PseudoHuber:
      for (std::size_t i = 0; i < residual.size(); ++i) {
        out.value += pseudo_huber_scalar(residual[i], delta);
        out.grad[i] = pseudo_huber_grad_scalar(residual[i], delta);
      }
      break;
    case LossKind::PseudoHuberDiffusers:
      for (std::size_t i = 0; i < residual.size(); ++i) {
        out.value += diffusers_scalar(residual[i], delta);
        out.grad[i] = diffusers_grad_scalar(residual[i], delta);
      }
      break;
    case LossKind::L2:
      break;  // handled above
  }
  return out;
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::L2: return "l2";
    case LossKind::Huber: return "huber";
    case LossKind::PseudoHuber: return "pseudo_huber";
    case LossKind::PseudoHuberDiffusers: return "pseudo_huber_diffusers";
  }
  throw std::logic_error("unknown LossKind");
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::ExpDecrease: return "exp_decrease";
    case ScheduleKind::ExpIncrease: return "exp_increase";
  }
  throw std::logic_error("unknown ScheduleKind");
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "l2") return LossKind::L2;
  if (name == "huber") return LossKind::Huber;
  if (name == "pseudo_huber") return LossKind::PseudoHuber;
  if (name == "pseudo_huber_diffusers") return LossKind::PseudoHuberDiffusers;
  throw std::invalid_argument("unknown loss kind: " + name);
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "constant") return ScheduleKind::Constant;
  if (name == "exp_decrease") return ScheduleKind::ExpDecrease;
  if (name == "exp_increase") return ScheduleKind::ExpIncrease;
  throw std::invalid_argument("unknown schedule kind: " + name);
}

std::string loss_id(const LossSpec& spec) {
  if (spec.kind == LossKind::L2) return "l2";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", spec.schedule.delta0);
  return to_string(spec.kind) + "-" + to_string(spec.schedule.kind) + "-" + buf;
}

}  // namespace robustdiff
