#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "robustdiff/rng.hpp"
#include "robustdiff/vec.hpp"

namespace robustdiff {

/// Exact 1D Wasserstein-1 distance between two equally sized sample sets:
/// the mean absolute difference of order statistics. Inputs need not be
/// pre-sorted; counts must match (resample before calling if they differ).
double wasserstein1_1d(std::span<const double> a, std::span<const double> b);

/// Sliced Wasserstein distance: mean of the 1D W1 over random unit-direction
/// projections. In 2D the directions are equal-angle strata with a shared
/// uniform angular offset drawn from rng, which cuts the estimator variance
/// by orders of magnitude at the same projection count; in other dimensions
/// directions are normalized Gaussian draws. Unequal sample counts are
/// reduced per projection by evenly spaced order statistics of the larger
/// set.
double sliced_wasserstein(const Matrix& a, const Matrix& b, std::size_t n_projections,
                          Rng& rng);

enum class SimilarityMethod { NegW1_1D, NegSlicedW };

/// Similarity of two sample sets: 0 is the maximum (identical sets), more
/// negative is less similar.
struct SimilarityScore {
  double value = 0.0;
  SimilarityMethod method = SimilarityMethod::NegSlicedW;
};

constexpr std::size_t kDefaultProjections = 256;

/// All similarity evaluations share this projection seed so that scores
/// entering one resilience comparison see identical directions.
constexpr std::uint64_t kDefaultProjectionSeed = 424242;

/// value = -sliced_wasserstein(generated, reference) (negative plain W1 in
/// one dimension). Symmetric in its arguments.
SimilarityScore similarity(const Matrix& generated, const Matrix& reference,
                           std::size_t n_projections = kDefaultProjections,
                           std::uint64_t projection_seed = kDefaultProjectionSeed);

/// Difference-form resilience R = S^corrupted_to_clean - S^clean_to_clean.
/// R <= 0 up to noise; closer to 0 means more corruption-resistant. Both
/// scores must have been computed with the same method.
double resilience_diff(const SimilarityScore& corrupted_to_clean,
                       const SimilarityScore& clean_to_clean);

/// Division-form (legacy) resilience with its instability guard.
struct DivResilience {
  double value = 0.0;
  bool unstable = false;  // set when either denominator magnitude < 1e-3
};

/// R = S^corr_to_clean / S^corr_to_poison - S^clean_to_clean / S^clean_to_poison.
/// Kept for comparison only; small denominators make the fraction explode, so
/// the result is flagged (never thrown) when |denominator| < 1e-3, and
/// denominators below 1e-12 are clamped to keep the emitted value finite.
DivResilience resilience_div(double s_corr_to_clean, double s_corr_to_poison,
                             double s_clean_to_clean, double s_clean_to_poison);

/// For each threshold (sorted ascending), the number of samples with
/// similarity strictly below it. Monotone nondecreasing in the threshold.
std::vector<std::size_t> threshold_counts(std::span<const double> per_sample_similarities,
                                          std::span<const double> thresholds);

/// Per-sample similarity used by the threshold analysis: negative Euclidean
/// distance to the nearest reference point.
Vector nearest_reference_similarities(const Matrix& samples, const Matrix& reference);

}  // namespace robustdiff
