#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "robustdiff/diffusion.hpp"
#include "robustdiff/losses.hpp"
#include "robustdiff/metrics.hpp"
#include "robustdiff/mixture.hpp"
#include "robustdiff/scorenet.hpp"

namespace robustdiff {

enum class SamplerKind { ReverseSde, ProbabilityFlowOde };

std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

/// Everything that pins one training run. Serializes to flat JSON; unknown
/// fields in a config file are errors, not warnings.
struct RunConfig {
  std::string preset = "rings-vs-blob";
  double corruption_fraction = 0.0;
  LossSpec loss;
  int train_steps = 2000;
  int batch_size = 128;
  int n_sample = 1024;
  SamplerKind sampler = SamplerKind::ReverseSde;
  int sampler_steps = 200;
  std::uint64_t seed = 1;
  int checkpoint_interval = 200;

  void validate() const;
};

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Fixed seeds for the 4096-point held-out reference sets; every similarity
/// in a benchmark is computed against the same references so that R compares
/// runs, not reference draws.
constexpr std::uint64_t kCleanReferenceSeed = 771001;
constexpr std::uint64_t kPoisonReferenceSeed = 771002;
constexpr std::size_t kReferenceSize = 4096;

/// Thresholds for the per-sample similarity counts (similarity = negative
/// distance to the nearest clean reference point).
const std::vector<double>& similarity_thresholds();

struct CheckpointRow {
  int step = 0;
  double train_loss = 0.0;  // mean loss over the window since the last checkpoint
  double s_to_clean = 0.0;
  double s_to_poison = 0.0;
  double clean_s_to_clean = 0.0;   // clean-baseline twin, same checkpoint
  double clean_s_to_poison = 0.0;
  double r_diff = 0.0;
  double r_div = 0.0;
  bool r_div_unstable = false;
  std::vector<std::size_t> below_threshold;
};

struct RunResult {
  RunConfig config;
  std::vector<CheckpointRow> rows;
  bool failed = false;
  std::string failure;
  ScoreNet model;  // final weights of the (possibly corrupted) run

  const CheckpointRow& final_row() const;
};

/// Trains on the corrupted dataset and on an independent clean twin (split
/// seed), measuring similarity to the fixed references at every checkpoint;
/// R values pair the two series per checkpoint. Divergence is recorded as a
/// failure result, not thrown; config errors throw std::invalid_argument.
RunResult run_experiment(const RunConfig& cfg);

/// Cross-product experiment grid. Cell seeds are derived by splitting the
/// master seed per seed index (not per cell), so runs that differ only in
/// loss or fraction share data and noise streams and compare paired.
struct GridConfig {
  std::string preset = "rings-vs-blob";
  std::vector<double> fractions = {0.0, 0.15, 0.30, 0.45};
  std::vector<LossSpec> losses;
  std::uint64_t master_seed = 1;
  int n_seeds = 5;
  int train_steps = 2000;
  int batch_size = 128;
  int n_sample = 1024;
  SamplerKind sampler = SamplerKind::ReverseSde;
  int sampler_steps = 200;
  int checkpoint_interval = 200;

  void validate() const;
  std::vector<RunConfig> expand() const;  // canonical cell order
  std::uint64_t seed_for_index(int seed_index) const;
};

std::string grid_config_to_json(const GridConfig& cfg);
GridConfig grid_config_from_json(const std::string& text);
GridConfig load_grid_config(const std::string& path);
GridConfig default_grid_config();

/// Runs all cells (parallel across cells when parallelism > 1) and returns
/// results in canonical order. Cell failures are contained; they surface as
/// failed results.
std::vector<RunResult> run_grid(const GridConfig& grid, int parallelism = 1);

struct AggregateRow {
  std::string loss;
  double fraction = 0.0;
  int n_seeds = 0;
  int n_failed = 0;
  double mean_final_r_diff = 0.0;
  double stddev_final_r_diff = 0.0;
  double mean_final_s_to_clean = 0.0;
};

/// Mean final-checkpoint resilience per (loss, fraction) across seeds.
std::vector<AggregateRow> aggregate_results(const std::vector<RunResult>& results);

/// CSV emission. All numbers are written with 12 significant digits.
std::string run_result_to_csv(const RunResult& result);
void write_run_csv(const std::string& path, const RunResult& result);

/// Writes per-cell CSVs plus cells.csv (one row per grid cell, including
/// failures) and aggregate.csv into `out_dir`.
void write_grid_outputs(const std::string& out_dir, const GridConfig& grid,
                        const std::vector<RunResult>& results);

std::string cells_csv(const GridConfig& grid, const std::vector<RunResult>& results);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string cell_file_name(const RunConfig& cfg, int seed_index);

}  // namespace robustdiff
