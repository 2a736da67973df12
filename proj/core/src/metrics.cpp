#include "robustdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace robustdiff {

double wasserstein1_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1_1d: empty input");
  if (a.size() != b.size()) {
    throw std::invalid_argument("wasserstein1_1d: sample counts must match");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) acc += std::abs(sa[i] - sb[i]);
  return acc / static_cast<double>(sa.size());
}

namespace {

// W1 of two sorted projections, thinning the larger set to the smaller count
// by evenly spaced order statistics.
double w1_sorted_thinned(const std::vector<double>& sa, const std::vector<double>& sb) {
  const std::size_t n = std::min(sa.size(), sb.size());
  const auto& small = sa.size() <= sb.size() ? sa : sb;
  const auto& large = sa.size() <= sb.size() ? sb : sa;
  const double ratio = static_cast<double>(large.size()) / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>((static_cast<double>(i) + 0.5) * ratio);
    acc += std::abs(small[i] - large[std::min(k, large.size() - 1)]);
  }
  return acc / static_cast<double>(n);
}

void project(const Matrix& points, std::span<const double> direction,
             std::vector<double>& out) {
  out.resize(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto row = points.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * direction[j];
    out[i] = acc;
  }
}

}  // namespace

double sliced_wasserstein(const Matrix& a, const Matrix& b, std::size_t n_projections,
                          Rng& rng) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw std::invalid_argument("sliced_wasserstein: empty input");
  }
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("sliced_wasserstein: dimension mismatch");
  }
  if (n_projections == 0) {
    throw std::invalid_argument("sliced_wasserstein: n_projections must be >= 1");
  }
  const std::size_t dim = a.cols();

  if (dim == 1) {
    std::vector<double> pa(a.data().begin(), a.data().end());
    std::vector<double> pb(b.data().begin(), b.data().end());
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    return w1_sorted_thinned(pa, pb);
  }

  const double offset = rng.next_uniform();
  std::vector<double> direction(dim);
  std::vector<double> pa;
  std::vector<double> pb;
  double acc = 0.0;
  for (std::size_t p = 0; p < n_projections; ++p) {
    if (dim == 2) {
      const double angle = 2.0 * std::numbers::pi *
                           ((static_cast<double>(p) + offset) / static_cast<double>(n_projections));
      direction[0] = std::cos(angle);
      direction[1] = std::sin(angle);
    } else {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (auto& d : direction) {
          d = rng.next_normal();
          norm2 += d * d;
        }
      } while (norm2 < 1e-24);
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& d : direction) d *= inv;
    }
    project(a, direction, pa);
    project(b, direction, pb);
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    acc += w1_sorted_thinned(pa, pb);
  }
  return acc / static_cast<double>(n_projections);
}

SimilarityScore similarity(const Matrix& generated, const Matrix& reference,
                           std::size_t n_projections, std::uint64_t projection_seed) {
  Rng rng(projection_seed);
  SimilarityScore score;
  score.method = generated.cols() == 1 ? SimilarityMethod::NegW1_1D
                                       : SimilarityMethod::NegSlicedW;
  score.value = -sliced_wasserstein(generated, reference, n_projections, rng);
  return score;
}

double resilience_diff(const SimilarityScore& corrupted_to_clean,
                       const SimilarityScore& clean_to_clean) {
  if (corrupted_to_clean.method != clean_to_clean.method) {
    throw std::invalid_argument("resilience_diff: similarity methods differ");
  }
  return corrupted_to_clean.value - clean_to_clean.value;
}

DivResilience resilience_div(double s_corr_to_clean, double s_corr_to_poison,
                             double s_clean_to_clean, double s_clean_to_poison) {
  constexpr double kUnstableBand = 1e-3;
  constexpr double kClamp = 1e-12;
  DivResilience out;
  out.unstable = std::abs(s_corr_to_poison) < kUnstableBand ||
                 std::abs(s_clean_to_poison) < kUnstableBand;
  auto safe_denom = [](double d) {
    if (std::abs(d) >= kClamp) return d;
    return d < 0.0 ? -kClamp : kClamp;
  };
  out.value = s_corr_to_clean / safe_denom(s_corr_to_poison) -
              s_clean_to_clean / safe_denom(s_clean_to_poison);
  return out;
}

std::vector<std::size_t> threshold_counts(std::span<const double> per_sample_similarities,
                                          std::span<const double> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("threshold_counts: thresholds must be sorted ascending");
  }
  std::vector<double> sorted(per_sample_similarities.begin(), per_sample_similarities.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> counts;
  counts.reserve(thresholds.size());
  for (double thr : thresholds) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), thr);
    counts.push_back(static_cast<std::size_t>(it - sorted.begin()));
  }
  return counts;
}

Vector nearest_reference_similarities(const Matrix& samples, const Matrix& reference) {
  if (samples.cols() != reference.cols()) {
    throw std::invalid_argument("nearest_reference_similarities: dimension mismatch");
  }
  if (reference.rows() == 0) {
    throw std::invalid_argument("nearest_reference_similarities: empty reference");
  }
  Vector out(samples.rows());
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    const auto s = samples.row(i);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < reference.rows(); ++r) {
      const auto ref = reference.row(r);
      double d2 = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double d = s[j] - ref[j];
        d2 += d * d;
      }
      best = std::min(best, d2);
    }
    out[i] = -std::sqrt(best);
  }
  return out;
}

}  // namespace robustdiff
