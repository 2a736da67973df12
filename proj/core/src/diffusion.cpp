#include "robustdiff/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace robustdiff {

double VpProcess::beta(double t) const {
  return beta_min + (t / horizon) * (beta_max - beta_min);
}

double VpProcess::integrated_beta(double t) const {
  return beta_min * t + (beta_max - beta_min) * t * t / (2.0 * horizon);
}

void VpProcess::validate() const {
  if (!(beta_min > 0.0) || !(beta_max >= beta_min) || !(horizon > 0.0)) {
    throw std::invalid_argument("VpProcess requires 0 < beta_min <= beta_max, horizon > 0");
  }
}

MarginalStats marginal_stats(const VpProcess& proc, double t) {
  proc.validate();
  if (!(t >= 0.0 && t <= proc.horizon)) {
    throw std::invalid_argument("marginal_stats: t outside [0, T]");
  }
  MarginalStats stats;
  stats.mean_coef = std::exp(-0.5 * proc.integrated_beta(t));
  stats.var = 1.0 - stats.mean_coef * stats.mean_coef;
  return stats;
}

Vector perturb(const VpProcess& proc, const Vector& x0, double t, const Vector& eps) {
  if (x0.size() != eps.size()) {
    throw std::invalid_argument("perturb: x0/eps dimension mismatch");
  }
  const MarginalStats stats = marginal_stats(proc, t);
  const double noise_scale = std::sqrt(stats.var);
  Vector x_t(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    x_t[i] = stats.mean_coef * x0[i] + noise_scale * eps[i];
  }
  return x_t;
}

Vector conditional_score(const VpProcess& proc, const Vector& x_t, const Vector& x0,
                         double t) {
  if (x_t.size() != x0.size()) {
    throw std::invalid_argument("conditional_score: dimension mismatch");
  }
  const MarginalStats stats = marginal_stats(proc, t);
  if (!(stats.var > 0.0)) {
    throw std::invalid_argument("conditional_score: singular at t = 0");
  }
  Vector score(x_t.size());
  for (std::size_t i = 0; i < x_t.size(); ++i) {
    score[i] = -(x_t[i] - stats.mean_coef * x0[i]) / stats.var;
  }
  return score;
}

namespace {

// log N(x; mean, var) summed over coordinates, diagonal covariance.
double diag_gaussian_logpdf(std::span<const double> x, std::span<const double> mean,
                            std::span<const double> var) {
  constexpr double kLog2Pi = 1.8378770664093454836;
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - mean[j];
    acc += -0.5 * (kLog2Pi + std::log(var[j]) + d * d / var[j]);
  }
  return acc;
}

struct PerturbedMixture {
  std::vector<Vector> means;
  std::vector<Vector> vars;
  std::vector<double> log_weights;
};

PerturbedMixture perturbed_params(const MixtureSpec& mixture, const MarginalStats& stats) {
  PerturbedMixture p;
  const double m = stats.mean_coef;
  for (const auto& comp : mixture.components) {
    Vector mean(mixture.dim);
    Vector var(mixture.dim);
    for (std::size_t j = 0; j < mixture.dim; ++j) {
      mean[j] = m * comp.mean[j];
      var[j] = m * m * comp.var_diag[j] + stats.var;
    }
    p.means.push_back(std::move(mean));
    p.vars.push_back(std::move(var));
    p.log_weights.push_back(std::log(comp.weight > 0.0 ? comp.weight : 1e-300));
  }
  return p;
}

}  // namespace

Vector analytic_mixture_score(const MixtureSpec& mixture, const VpProcess& proc,
                              const Vector& x, double t) {
  mixture.validate();
  if (x.size() != mixture.dim) {
    throw std::invalid_argument("analytic_mixture_score: dimension mismatch");
  }
  const MarginalStats stats = marginal_stats(proc, t);
  if (!(stats.var > 0.0)) {
    throw std::invalid_argument("analytic_mixture_score: requires t > 0");
  }
  const PerturbedMixture p = perturbed_params(mixture, stats);
  const std::size_t k_count = p.means.size();

  std::vector<double> logits(k_count);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < k_count; ++k) {
    logits[k] = p.log_weights[k] + diag_gaussian_logpdf(x, p.means[k], p.vars[k]);
    max_logit = std::max(max_logit, logits[k]);
  }
  double norm = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    logits[k] = std::exp(logits[k] - max_logit);
    norm += logits[k];
  }
  Vector score(x.size(), 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double resp = logits[k] / norm;
    for (std::size_t j = 0; j < x.size(); ++j) {
      score[j] += resp * (-(x[j] - p.means[k][j]) / p.vars[k][j]);
    }
  }
  require_finite(score, "analytic mixture score");
  return score;
}

Vector training_residual(ScoreNet& model, const VpProcess& proc, const Vector& x0,
                         double t, const Vector& eps, double t_min) {
  if (t < t_min) {
    throw std::invalid_argument("training_residual: t below the time floor");
  }
  const Vector x_t = perturb(proc, x0, t, eps);
  Vector residual = model.forward(x_t, t);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= eps[i];
  return residual;
}

double training_step(ScoreNet& model, AdamState& opt, const VpProcess& proc,
                     const LossSpec& loss, const Matrix& x0_batch, Rng& rng,
                     double t_min) {
  proc.validate();
  if (x0_batch.rows() == 0) {
    throw std::invalid_argument("training_step: empty batch");
  }
  const std::size_t batch = x0_batch.rows();
  const std::size_t dim = x0_batch.cols();

  std::vector<double> times(batch);
  Matrix eps(batch, dim);
  Matrix x_t(batch, dim);
  for (std::size_t i = 0; i < batch; ++i) {
    times[i] = t_min + (proc.horizon - t_min) * rng.next_uniform();
    const MarginalStats stats = marginal_stats(proc, times[i]);
    const double noise_scale = std::sqrt(stats.var);
    auto er = eps.row(i);
    auto xr = x_t.row(i);
    const auto x0r = x0_batch.row(i);
    for (std::size_t j = 0; j < dim; ++j) {
      er[j] = rng.next_normal();
      xr[j] = stats.mean_coef * x0r[j] + noise_scale * er[j];
    }
  }

  ScoreNet::Workspace ws;
  Matrix eps_hat = model.forward_batch(x_t, times, &ws);

  double total_loss = 0.0;
  Matrix upstream(batch, dim);
  Vector residual(dim);
  for (std::size_t i = 0; i < batch; ++i) {
    const auto pr = eps_hat.row(i);
    const auto er = eps.row(i);
    for (std::size_t j = 0; j < dim; ++j) residual[j] = pr[j] - er[j];
    const LossEval eval = loss_value_and_grad(loss, residual, times[i]);
    total_loss += eval.value;
    auto ur = upstream.row(i);
    for (std::size_t j = 0; j < dim; ++j) {
      ur[j] = eval.grad[j] / static_cast<double>(batch);
    }
  }
  const double mean_loss = total_loss / static_cast<double>(batch);
  if (!std::isfinite(mean_loss)) {
    std::ostringstream msg;
    msg << "training diverged: non-finite batch loss (loss=" << to_string(loss.kind)
        << ", adam step " << opt.step_count() + 1 << ")";
    throw std::runtime_error(msg.str());
  }

  const NetGrads grads = model.backward(ws, upstream);
  opt.step(model, grads);
  return mean_loss;
}

ScoreFn model_score_fn(ScoreNet net, const VpProcess& proc) {
  return [net = std::move(net), proc](const Matrix& x, double t) mutable {
    const MarginalStats stats = marginal_stats(proc, t);
    const double inv_std = 1.0 / std::sqrt(stats.var);
    Matrix score = net.forward_batch(x, t);
    for (double& v : score.data()) v = -v * inv_std;
    return score;
  };
}

ScoreFn mixture_score_fn(MixtureSpec mixture, const VpProcess& proc) {
  mixture.validate();
  return [mixture = std::move(mixture), proc](const Matrix& x, double t) {
    Matrix score(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
      score.set_row(i, analytic_mixture_score(mixture, proc, x.row_vector(i), t));
    }
    return score;
  };
}

namespace {

enum class SamplerMode { Sde, Ode };

Matrix integrate_reverse(const ScoreFn& score_fn, const VpProcess& proc,
                         std::size_t n_steps, Rng& rng, std::size_t n_samples,
                         std::size_t dim, double t_min, SamplerMode mode) {
  proc.validate();
  if (n_steps == 0) throw std::invalid_argument("sampler requires n_steps >= 1");
  if (n_samples == 0 || dim == 0) {
    throw std::invalid_argument("sampler requires n_samples >= 1 and dim >= 1");
  }
  if (!(t_min > 0.0 && t_min < proc.horizon)) {
    throw std::invalid_argument("sampler requires 0 < t_min < T");
  }

  Matrix x(n_samples, dim);
  for (double& v : x.data()) v = rng.next_normal();

  const double dt = (proc.horizon - t_min) / static_cast<double>(n_steps);
  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t = proc.horizon - static_cast<double>(step) * dt;
    const double beta = proc.beta(t);
    const Matrix score = score_fn(x, t);
    if (score.rows() != n_samples || score.cols() != dim) {
      throw std::invalid_argument("score_fn returned wrong shape");
    }
    const double score_gain = (mode == SamplerMode::Sde) ? beta : 0.5 * beta;
    const double noise_scale = (mode == SamplerMode::Sde) ? std::sqrt(beta * dt) : 0.0;
    auto xd = x.data();
    const auto sd = score.data();
    for (std::size_t i = 0; i < xd.size(); ++i) {
      // X_{t-dt} = X_t - (f - gain * s) dt (+ g sqrt(dt) z for the SDE)
      double next = xd[i] - (-0.5 * beta * xd[i] - score_gain * sd[i]) * dt;
      if (mode == SamplerMode::Sde) next += noise_scale * rng.next_normal();
      xd[i] = next;
    }
    if (!all_finite(x.data())) {
      std::ostringstream msg;
      msg << "sampler diverged: non-finite state at t=" << t - dt << " (step "
          << step + 1 << "/" << n_steps << ")";
      throw std::runtime_error(msg.str());
    }
  }
  return x;
}

}  // namespace

Matrix sample_reverse_sde(const ScoreFn& score, const VpProcess& proc,
                          std::size_t n_steps, Rng& rng, std::size_t n_samples,
                          std::size_t dim, double t_min) {
  return integrate_reverse(score, proc, n_steps, rng, n_samples, dim, t_min,
                           SamplerMode::Sde);
}

Matrix sample_probability_flow_ode(const ScoreFn& score, const VpProcess& proc,
                                   std::size_t n_steps, Rng& rng,
                                   std::size_t n_samples, std::size_t dim,
                                   double t_min) {
  return integrate_reverse(score, proc, n_steps, rng, n_samples, dim, t_min,
                           SamplerMode::Ode);
}

}  // namespace robustdiff
