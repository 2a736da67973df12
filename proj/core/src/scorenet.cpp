#include "robustdiff/scorenet.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace robustdiff {

Vector time_features(double t, double horizon, std::size_t feature_dim) {
  if (feature_dim == 0 || feature_dim % 2 != 0) {
    throw std::invalid_argument("time_feature_dim must be a positive even number");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  Vector out(feature_dim);
  const double phase_base = 2.0 * std::numbers::pi * (t / horizon);
  double freq = 0.5;
  for (std::size_t k = 0; k < feature_dim / 2; ++k) {
    const double phase = phase_base * freq;
    out[2 * k] = std::sin(phase);
    out[2 * k + 1] = std::cos(phase);
    freq *= 2.0;
  }
  return out;
}

void NetConfig::validate() const {
  if (data_dim == 0) throw std::invalid_argument("data_dim must be >= 1");
  if (hidden.empty()) throw std::invalid_argument("need at least one hidden layer");
  for (std::size_t h : hidden) {
    if (h == 0) throw std::invalid_argument("hidden width must be >= 1");
  }
  if (time_feature_dim == 0 || time_feature_dim % 2 != 0) {
    throw std::invalid_argument("time_feature_dim must be a positive even number");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
}

ScoreNet::ScoreNet(NetConfig cfg, Rng& rng) : cfg_(std::move(cfg)) {
  cfg_.validate();
  std::vector<std::size_t> widths;
  widths.push_back(cfg_.input_dim());
  widths.insert(widths.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  widths.push_back(cfg_.data_dim);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t fan_in = widths[l];
    const std::size_t fan_out = widths[l + 1];
    const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
    DenseLayer layer;
    layer.w = Matrix(fan_out, fan_in);
    layer.b = Vector(fan_out);
    for (std::size_t i = 0; i < fan_out; ++i) {
      for (std::size_t j = 0; j < fan_in; ++j) {
        layer.w(i, j) = limit * (2.0 * rng.next_uniform() - 1.0);
      }
    }
    for (std::size_t i = 0; i < fan_out; ++i) {
      layer.b[i] = limit * (2.0 * rng.next_uniform() - 1.0);
    }
    layers_.push_back(std::move(layer));
  }
}

Matrix ScoreNet::forward_batch(const Matrix& x, std::span<const double> t,
                               Workspace* ws) const {
  if (layers_.empty()) throw std::logic_error("forward on default-constructed net");
  if (x.cols() != cfg_.data_dim) {
    throw std::invalid_argument("forward: input dimension != data_dim");
  }
  if (t.size() != x.rows()) {
    throw std::invalid_argument("forward: one time per input row required");
  }
  const std::size_t batch = x.rows();
  Matrix input(batch, cfg_.input_dim());
  for (std::size_t i = 0; i < batch; ++i) {
    auto row = input.row(i);
    const auto xin = x.row(i);
    std::copy(xin.begin(), xin.end(), row.begin());
    const Vector feats = time_features(t[i], cfg_.horizon, cfg_.time_feature_dim);
    std::copy(feats.begin(), feats.end(), row.begin() + cfg_.data_dim);
  }

  if (ws) {
    ws->acts.clear();
    ws->valid = false;
  }
  Matrix a = std::move(input);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (ws) ws->acts.push_back(a);
    const auto& layer = layers_[l];
    Matrix z = matmul_nt(a, layer.w);
    for (std::size_t i = 0; i < z.rows(); ++i) {
      auto zr = z.row(i);
      for (std::size_t j = 0; j < zr.size(); ++j) zr[j] += layer.b[j];
    }
    if (l + 1 < layers_.size()) {
      for (double& v : z.data()) v = std::tanh(v);
    }
    a = std::move(z);
  }
  if (ws) ws->valid = true;
  return a;
}

Matrix ScoreNet::forward_batch(const Matrix& x, double t) const {
  const std::vector<double> times(x.rows(), t);
  return forward_batch(x, times, nullptr);
}

Vector ScoreNet::forward(const Vector& x, double t) {
  Matrix xm(1, x.size());
  xm.set_row(0, x);
  const std::vector<double> times = {t};
  Matrix out = forward_batch(xm, times, &last_);
  return out.row_vector(0);
}

NetGrads ScoreNet::backward(const Workspace& ws, const Matrix& upstream) const {
  if (!ws.valid || ws.acts.size() != layers_.size()) {
    throw std::logic_error("backward called without a matching forward pass");
  }
  if (upstream.rows() != ws.acts.front().rows() ||
      upstream.cols() != cfg_.data_dim) {
    throw std::invalid_argument("backward: upstream shape mismatch");
  }
  NetGrads grads = zero_grads();
  Matrix delta = upstream;  // dL/dz for the current layer
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const Matrix& a_in = ws.acts[li];
    grads[li].w = matmul_tn(delta, a_in);
    for (std::size_t i = 0; i < delta.rows(); ++i) {
      const auto dr = delta.row(i);
      for (std::size_t j = 0; j < dr.size(); ++j) grads[li].b[j] += dr[j];
    }
    if (li == 0) break;
    Matrix next = matmul(delta, layers_[li].w);  // dL/da_in, (batch x in)
    // a_in is tanh(z) of the previous layer, so sigma'(z) = 1 - a_in^2.
    for (std::size_t i = 0; i < next.rows(); ++i) {
      auto nr = next.row(i);
      const auto ar = a_in.row(i);
      for (std::size_t j = 0; j < nr.size(); ++j) nr[j] *= 1.0 - ar[j] * ar[j];
    }
    delta = std::move(next);
  }
  return grads;
}

NetGrads ScoreNet::backward(const Vector& upstream_grad) const {
  if (!last_.valid) {
    throw std::logic_error("backward called before forward");
  }
  Matrix up(1, upstream_grad.size());
  up.set_row(0, upstream_grad);
  return backward(last_, up);
}

NetGrads ScoreNet::zero_grads() const {
  NetGrads grads;
  grads.reserve(layers_.size());
  for (const auto& layer : layers_) {
    grads.push_back({Matrix(layer.w.rows(), layer.w.cols()), Vector(layer.b.size())});
  }
  return grads;
}

std::size_t ScoreNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.w.size() + layer.b.size();
  return n;
}

double ScoreNet::get_parameter(std::size_t flat_index) const {
  for (const auto& layer : layers_) {
    if (flat_index < layer.w.size()) return layer.w.data()[flat_index];
    flat_index -= layer.w.size();
    if (flat_index < layer.b.size()) return layer.b[flat_index];
    flat_index -= layer.b.size();
  }
  throw std::out_of_range("parameter index out of range");
}

void ScoreNet::set_parameter(std::size_t flat_index, double value) {
  for (auto& layer : layers_) {
    if (flat_index < layer.w.size()) {
      layer.w.data()[flat_index] = value;
      return;
    }
    flat_index -= layer.w.size();
    if (flat_index < layer.b.size()) {
      layer.b[flat_index] = value;
      return;
    }
    flat_index -= layer.b.size();
  }
  throw std::out_of_range("parameter index out of range");
}

Vector flatten_grads(const NetGrads& grads) {
  Vector flat;
  for (const auto& g : grads) {
    flat.insert(flat.end(), g.w.data().begin(), g.w.data().end());
    flat.insert(flat.end(), g.b.begin(), g.b.end());
  }
  return flat;
}

AdamState::AdamState(const ScoreNet& net, AdamConfig cfg)
    : cfg_(cfg), m_(net.zero_grads()), v_(net.zero_grads()) {}

void AdamState::step(ScoreNet& net, const NetGrads& grads) {
  if (grads.size() != m_.size()) {
    throw std::invalid_argument("adam step: gradient/layer count mismatch");
  }
  count_ += 1;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(count_));
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto update = [&](double& param, double g, double& m, double& v) {
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m / bc1;
      const double vhat = v / bc2;
      param -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    };
    auto wdata = layers[l].w.data();
    const auto gw = grads[l].w.data();
    auto mw = m_[l].w.data();
    auto vw = v_[l].w.data();
    for (std::size_t i = 0; i < wdata.size(); ++i) {
      update(wdata[i], gw[i], mw[i], vw[i]);
    }
    for (std::size_t i = 0; i < layers[l].b.size(); ++i) {
      update(layers[l].b[i], grads[l].b[i], m_[l].b[i], v_[l].b[i]);
    }
  }
}

namespace {

constexpr char kMagic[4] = {'R', 'D', 'N', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(buf), 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ofstream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::ifstream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double get_f64(std::ifstream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void save_checkpoint(const std::string& path, const ScoreNet& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  const auto& cfg = net.config();
  put_u64(out, cfg.data_dim);
  put_u64(out, cfg.time_feature_dim);
  put_f64(out, cfg.horizon);
  put_u64(out, cfg.hidden.size() + 2);
  put_u64(out, cfg.input_dim());
  for (std::size_t h : cfg.hidden) put_u64(out, h);
  put_u64(out, cfg.data_dim);
  for (const auto& layer : net.layers()) {
    for (double v : layer.w.data()) put_f64(out, v);
    for (double v : layer.b) put_f64(out, v);
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

ScoreNet load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  if (get_u32(in) != kVersion) throw std::runtime_error("unsupported checkpoint version");
  NetConfig cfg;
  cfg.data_dim = get_u64(in);
  cfg.time_feature_dim = get_u64(in);
  cfg.horizon = get_f64(in);
  const std::uint64_t n_widths = get_u64(in);
  if (n_widths < 3 || n_widths > 64) throw std::runtime_error("corrupt checkpoint header");
  std::vector<std::size_t> widths(n_widths);
  for (auto& w : widths) w = get_u64(in);
  cfg.hidden.assign(widths.begin() + 1, widths.end() - 1);
  if (widths.front() != cfg.input_dim() || widths.back() != cfg.data_dim) {
    throw std::runtime_error("inconsistent checkpoint widths");
  }
  Rng scratch(0);
  ScoreNet net(cfg, scratch);
  for (auto& layer : net.layers()) {
    for (double& v : layer.w.data()) v = get_f64(in);
    for (double& v : layer.b) v = get_f64(in);
  }
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  return net;
}

}  // namespace robustdiff
