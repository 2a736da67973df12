#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robustdiff/rng.hpp"
#include "robustdiff/vec.hpp"

namespace robustdiff {

/// One Gaussian mixture component with diagonal covariance.
struct MixtureComponent {
  double weight = 1.0;
  Vector mean;
  Vector var_diag;  // per-coordinate variances, all > 0
};

/// Gaussian mixture over R^dim. Weights must sum to 1.
struct MixtureSpec {
  std::size_t dim = 0;
  std::vector<MixtureComponent> components;

  void validate() const;
};

/// n i.i.d. draws: categorical component choice, then a Gaussian draw.
Matrix sample_mixture(const MixtureSpec& spec, std::size_t n, Rng& rng);

enum class PointLabel : std::uint8_t { Clean = 0, Outlier = 1 };

/// Corruption protocol: a fraction of points is *replaced* (never appended)
/// by draws from an outlier distribution with disjoint support.
struct CorruptionSpec {
  double fraction = 0.0;  // in [0, 1)
  MixtureSpec outlier;
};

struct TrainingSet {
  Matrix points;
  std::vector<PointLabel> labels;  // ground truth, not visible to training
  std::uint64_t provenance_seed = 0;

  std::size_t outlier_count() const;
};

/// Replaces round(fraction * n) uniformly chosen rows of `clean_points` with
/// outlier draws and records labels. fraction = 0 returns the input untouched.
TrainingSet corrupt(const Matrix& clean_points, const CorruptionSpec& cspec, Rng& rng);

/// Benchmark preset "rings-vs-blob": clean data is 8 sigma=0.1 Gaussians on a
/// radius-2 circle; the outlier blob sits at (6,6) with sigma=0.3, so the two
/// supports are disjoint and contamination influence is unambiguous.
struct DataPreset {
  std::string id;
  MixtureSpec clean;
  MixtureSpec outlier;
  std::size_t train_size = 2048;
};

DataPreset rings_vs_blob_preset();
const DataPreset& preset_by_id(const std::string& id);

/// CSV export/import: header "x0,...,x{d-1}[,label]", one row per point.
void write_points_csv(const std::string& path, const Matrix& points,
                      const std::vector<PointLabel>* labels = nullptr);

struct PointsCsv {
  Matrix points;
  std::vector<PointLabel> labels;  // empty when the file has no label column
};

PointsCsv read_points_csv(const std::string& path);

}  // namespace robustdiff
