#pragma once

#include <string>

#include "robustdiff/vec.hpp"

namespace robustdiff {

enum class ScheduleKind { Constant, ExpDecrease, ExpIncrease };

/// Time-dependent delta parameter for the robust losses.
///
/// ExpDecrease follows delta(t) = delta0^(t/T): it starts at 1 and decays
/// exponentially to delta0 at the horizon, so the loss is near-quadratic for
/// small times and tolerant of large residuals at high noise levels.
/// ExpIncrease is the exact time reversal, delta_inc(t) = delta_dec(T - t).
struct DeltaSchedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double delta0 = 0.1;
  double horizon = 1.0;
};

/// delta(t) for t in [0, horizon]. Throws if t is out of range or delta0 <= 0.
double delta_at(const DeltaSchedule& schedule, double t);

enum class LossKind { L2, Huber, PseudoHuber, PseudoHuberDiffusers };

/// Loss kernel plus its delta schedule. The schedule is ignored for L2.
struct LossSpec {
  LossKind kind = LossKind::L2;
  DeltaSchedule schedule;
};

/// Classic Huber loss, summed over coordinates:
/// h(x) = x^2/2 for |x| <= delta, delta*(|x| - delta/2) otherwise.
double huber(const Vector& residual, double delta);

/// Smooth pseudo-Huber loss, summed over coordinates:
/// H(x) = delta^2 * (sqrt(1 + x^2/delta^2) - 1).
/// Evaluated in the cancellation-free form x^2 / (1 + sqrt(1 + x^2/delta^2)).
double pseudo_huber(const Vector& residual, double delta);

/// The variant without the leading delta^2 factor, summed over coordinates:
/// H(x) = sqrt(x^2 + c^2) - c. Kept to reproduce its wrong large-c
/// asymptotics (~x^2/(2c) instead of x^2/2); satisfies
/// pseudo_huber(x, d) == d * pseudo_huber_diffusers(x, d).
double pseudo_huber_diffusers(const Vector& residual, double c);

struct LossEval {
  double value = 0.0;
  Vector grad;  // d value / d residual
};

/// Loss value and analytic residual gradient at time t, with delta taken from
/// the spec's schedule. L2 returns |x|^2 (no 1/2 factor) with gradient 2x.
LossEval loss_value_and_grad(const LossSpec& spec, const Vector& residual, double t);

std::string to_string(LossKind kind);
std::string to_string(ScheduleKind kind);
LossKind loss_kind_from_string(const std::string& name);
ScheduleKind schedule_kind_from_string(const std::string& name);

/// Short stable identifier such as "pseudo_huber-exp_decrease-0.1", used in
/// result tables and file names.
std::string loss_id(const LossSpec& spec);

}  // namespace robustdiff
