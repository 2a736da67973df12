#pragma once

#include <functional>

#include "robustdiff/losses.hpp"
#include "robustdiff/mixture.hpp"
#include "robustdiff/rng.hpp"
#include "robustdiff/scorenet.hpp"
#include "robustdiff/vec.hpp"

namespace robustdiff {

/// Variance-preserving forward SDE dX = -1/2 beta(t) X dt + sqrt(beta(t)) dW
/// with a linear beta ramp on [0, horizon]. The perturbation kernel is
/// Gaussian with mean_coef(t) = exp(-B(t)/2) and variance 1 - mean_coef^2,
/// where B(t) is the integral of beta.
struct VpProcess {
  double beta_min = 0.1;
  double beta_max = 20.0;
  double horizon = 1.0;

  double beta(double t) const;
  double integrated_beta(double t) const;
  void validate() const;
};

struct MarginalStats {
  double mean_coef = 1.0;  // in (0, 1]
  double var = 0.0;        // in [0, 1); mean_coef^2 + var == 1
};

/// Closed-form kernel coefficients at time t in [0, horizon].
MarginalStats marginal_stats(const VpProcess& proc, double t);

/// x_t = mean_coef * x0 + sqrt(var) * eps.
Vector perturb(const VpProcess& proc, const Vector& x0, double t, const Vector& eps);

/// Conditional (denoising) score of the perturbation kernel:
/// grad log p_{t|0}(x_t | x0) = -(x_t - mean_coef * x0) / var. Requires t > 0.
Vector conditional_score(const VpProcess& proc, const Vector& x_t, const Vector& x0,
                         double t);

/// Exact score of the perturbed marginal of a Gaussian mixture: under the VP
/// kernel the marginal at time t is again a mixture, with component means
/// mean_coef * mu_k and diagonal variances mean_coef^2 * var_k + var. The
/// responsibilities are evaluated with log-sum-exp stabilization.
Vector analytic_mixture_score(const MixtureSpec& mixture, const VpProcess& proc,
                              const Vector& x, double t);

/// Default lower truncation of the training/sampling time range; the
/// conditional score diverges like 1/sqrt(var) as t -> 0.
constexpr double kDefaultTimeFloor = 1e-3;

/// Noise-prediction training residual eps_hat(x_t, t) - eps for one example.
/// Equals -sqrt(var) times the score-space residual s_theta - grad log p_{t|0}.
Vector training_residual(ScoreNet& model, const VpProcess& proc, const Vector& x0,
                         double t, const Vector& eps,
                         double t_min = kDefaultTimeFloor);

/// One optimizer step on a batch of clean points: per example draws
/// t ~ U[t_min, T] and eps ~ N(0, I), forms the noise-prediction residual,
/// applies the loss kernel with delta = delta(t), backpropagates the
/// batch-mean gradient and applies Adam. Returns the batch-mean loss.
/// Throws on a non-finite loss.
double training_step(ScoreNet& model, AdamState& opt, const VpProcess& proc,
                     const LossSpec& loss, const Matrix& x0_batch, Rng& rng,
                     double t_min = kDefaultTimeFloor);

/// Batched score field: rows of the result are scores at the rows of x.
using ScoreFn = std::function<Matrix(const Matrix& x, double t)>;

/// Score field of a trained noise-prediction net: s = -eps_hat / sqrt(var).
/// Snapshots the network by value.
ScoreFn model_score_fn(ScoreNet net, const VpProcess& proc);

/// Analytic oracle score field for a known mixture.
ScoreFn mixture_score_fn(MixtureSpec mixture, const VpProcess& proc);

/// Euler-Maruyama integration of the reverse SDE
/// dX = (f - g^2 s) dt + g dW from t = horizon down to t_min on a uniform
/// grid, starting from the N(0, I) prior. Throws if n_steps == 0 or the
/// state turns non-finite.
Matrix sample_reverse_sde(const ScoreFn& score, const VpProcess& proc,
                          std::size_t n_steps, Rng& rng, std::size_t n_samples,
                          std::size_t dim, double t_min = kDefaultTimeFloor);

/// Euler integration of the probability-flow ODE dX = (f - g^2/2 s) dt; a
/// deterministic map of the initial prior draw.
Matrix sample_probability_flow_ode(const ScoreFn& score, const VpProcess& proc,
                                   std::size_t n_steps, Rng& rng,
                                   std::size_t n_samples, std::size_t dim,
                                   double t_min = kDefaultTimeFloor);

}  // namespace robustdiff
