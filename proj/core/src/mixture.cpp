#include "robustdiff/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace robustdiff {

void MixtureSpec::validate() const {
  if (dim == 0) throw std::invalid_argument("mixture dimension must be >= 1");
  if (components.empty()) throw std::invalid_argument("mixture needs >= 1 component");
  double total = 0.0;
  for (const auto& c : components) {
    if (c.weight < 0.0) throw std::invalid_argument("mixture weight < 0");
    if (c.mean.size() != dim || c.var_diag.size() != dim) {
      throw std::invalid_argument("mixture component dimension mismatch");
    }
    for (double v : c.var_diag) {
      if (!(v > 0.0)) throw std::invalid_argument("mixture variance must be positive");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
}

Matrix sample_mixture(const MixtureSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (n == 0) throw std::invalid_argument("sample_mixture: n must be >= 1");
  Matrix out(n, spec.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    double cum = 0.0;
    std::size_t pick = spec.components.size() - 1;
    for (std::size_t k = 0; k < spec.components.size(); ++k) {
      cum += spec.components[k].weight;
      if (u < cum) {
        pick = k;
        break;
      }
    }
    const auto& comp = spec.components[pick];
    auto row = out.row(i);
    for (std::size_t j = 0; j < spec.dim; ++j) {
      row[j] = comp.mean[j] + std::sqrt(comp.var_diag[j]) * rng.next_normal();
    }
  }
  return out;
}

std::size_t TrainingSet::outlier_count() const {
  return static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), PointLabel::Outlier));
}

TrainingSet corrupt(const Matrix& clean_points, const CorruptionSpec& cspec, Rng& rng) {
  if (!(cspec.fraction >= 0.0 && cspec.fraction < 1.0)) {
    throw std::invalid_argument("corruption fraction must be in [0, 1)");
  }
  const std::size_t n = clean_points.rows();
  TrainingSet out;
  out.points = clean_points;
  out.labels.assign(n, PointLabel::Clean);
  const auto n_replace = static_cast<std::size_t>(std::llround(cspec.fraction * static_cast<double>(n)));
  if (n_replace == 0) return out;

  // Partial Fisher-Yates: the first n_replace entries are a uniform subset.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < n_replace; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  const Matrix replacements = sample_mixture(cspec.outlier, n_replace, rng);
  for (std::size_t i = 0; i < n_replace; ++i) {
    out.points.set_row(idx[i], replacements.row(i));
    out.labels[idx[i]] = PointLabel::Outlier;
  }
  return out;
}

DataPreset rings_vs_blob_preset() {
  DataPreset p;
  p.id = "rings-vs-blob";
  p.train_size = 2048;
  p.clean.dim = 2;
  constexpr int kModes = 8;
  for (int k = 0; k < kModes; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / kModes;
    MixtureComponent c;
    c.weight = 1.0 / kModes;
    c.mean = {2.0 * std::cos(angle), 2.0 * std::sin(angle)};
    c.var_diag = {0.01, 0.01};  // sigma = 0.1
    p.clean.components.push_back(std::move(c));
  }
  p.outlier.dim = 2;
  MixtureComponent blob;
  blob.weight = 1.0;
  blob.mean = {6.0, 6.0};
  blob.var_diag = {0.09, 0.09};  // sigma = 0.3
  p.outlier.components.push_back(std::move(blob));
  return p;
}

const DataPreset& preset_by_id(const std::string& id) {
  static const DataPreset rings = rings_vs_blob_preset();
  if (id == rings.id) return rings;
  throw std::invalid_argument("unknown data preset: " + id);
}

void write_points_csv(const std::string& path, const Matrix& points,
                      const std::vector<PointLabel>* labels) {
  if (labels && labels->size() != points.rows()) {
    throw std::invalid_argument("write_points_csv: label count != point count");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t j = 0; j < points.cols(); ++j) {
    out << (j ? ",x" : "x") << j;
  }
  if (labels) out << ",label";
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto row = points.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      if (j) out << ',';
      out << buf;
    }
    if (labels) {
      out << ',' << ((*labels)[i] == PointLabel::Outlier ? "outlier" : "clean");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

PointsCsv read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  bool has_label = !header.empty() && header.back() == "label";
  const std::size_t dim = header.size() - (has_label ? 1 : 0);
  if (dim == 0) throw std::runtime_error("CSV has no coordinate columns: " + path);

  PointsCsv out;
  std::vector<Vector> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Vector point;
    point.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error("short CSV row in " + path);
      }
      point.push_back(std::stod(cell));
    }
    if (has_label) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("missing label in " + path);
      out.labels.push_back(cell == "outlier" ? PointLabel::Outlier : PointLabel::Clean);
    }
    rows.push_back(std::move(point));
  }
  if (rows.empty()) throw std::runtime_error("CSV has no data rows: " + path);
  out.points = Matrix::from_rows(rows);
  return out;
}

}  // namespace robustdiff
