#pragma once

// Smoothness-multiplier network: difference features, a small stride-1
// convolutional net (ELU hidden layers, sigmoid output), index-shifted
// multiplier triples and the JSON model file.

#include <cmath>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wenods/autodiff.hpp"
#include "wenods/random.hpp"
#include "wenods/weno.hpp"

namespace wenods {

class model_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation { ELU, Sigmoid };
enum class Branch { Positive, Negative };

struct ConvLayerSpec {
  int in_channels = 1;
  int out_channels = 1;
  int kernel_size = 1;
  Activation activation = Activation::ELU;

  int weight_count() const { return out_channels * in_channels * kernel_size; }
  int param_count() const { return weight_count() + out_channels; }
};

/// Layer specs plus a flat parameter vector: per layer, weights (out x in x
/// kernel, row-major) followed by biases.
class ConvNet {
 public:
  ConvNet() = default;
  explicit ConvNet(std::vector<ConvLayerSpec> layers) : layers_(std::move(layers)) {
    validate_specs();
    params_.assign(total_params(), 0.0);
  }

  const std::vector<ConvLayerSpec>& layers() const { return layers_; }
  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }

  void set_params(std::vector<double> params) {
    if (params.size() != total_params()) throw model_error("ConvNet: parameter count mismatch");
    for (double p : params)
      if (!std::isfinite(p)) throw model_error("ConvNet: non-finite parameter");
    params_ = std::move(params);
  }

  std::size_t total_params() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.param_count();
    return n;
  }

  /// k such that 2k+1 is the receptive field.
  int receptive_radius() const {
    int k = 0;
    for (const auto& l : layers_) k += (l.kernel_size - 1) / 2;
    return k;
  }

  int input_channels() const { return layers_.empty() ? 0 : layers_.front().in_channels; }

  /// Uniform weights in +-1/sqrt(fan_in), zero biases.
  void initialize(Rng& rng) {
    std::size_t offset = 0;
    for (const auto& l : layers_) {
      double bound = 1.0 / std::sqrt(static_cast<double>(l.in_channels * l.kernel_size));
      for (int k = 0; k < l.weight_count(); ++k) params_[offset + k] = rng.uniform(-bound, bound);
      for (int k = 0; k < l.out_channels; ++k) params_[offset + l.weight_count() + k] = 0.0;
      offset += l.param_count();
    }
  }

  /// Valid cross-correlation through every layer: each channel of `input`
  /// has length L and the output has length L - 2k.
  template <class T>
  std::vector<T> forward(std::span<const T> params, const std::vector<std::vector<T>>& input) const {
    if (params.size() != total_params()) throw model_error("ConvNet::forward: parameter count mismatch");
    if (static_cast<int>(input.size()) != input_channels())
      throw model_error("ConvNet::forward: input channel count mismatch");
    const std::size_t len = input.front().size();
    if (static_cast<int>(len) < 2 * receptive_radius() + 1)
      throw std::invalid_argument("ConvNet::forward: input shorter than the receptive field");
    std::vector<std::vector<T>> x = input;
    std::vector<T> gather;
    std::size_t offset = 0;
    for (const auto& l : layers_) {
      const std::size_t in_len = x.front().size();
      const std::size_t out_len = in_len - (l.kernel_size - 1);
      const std::size_t taps = static_cast<std::size_t>(l.in_channels * l.kernel_size);
      std::vector<std::vector<T>> y(l.out_channels, std::vector<T>(out_len));
      gather.resize(taps);
      for (std::size_t i = 0; i < out_len; ++i) {
        for (int c = 0; c < l.in_channels; ++c)
          for (int j = 0; j < l.kernel_size; ++j) gather[c * l.kernel_size + j] = x[c][i + j];
        for (int o = 0; o < l.out_channels; ++o) {
          std::span<const T> w = params.subspan(offset + o * taps, taps);
          T z = dot(w, std::span<const T>(gather), params[offset + l.weight_count() + o]);
          y[o][i] = l.activation == Activation::ELU ? elu(z) : sigmoid(z);
        }
      }
      x = std::move(y);
      offset += l.param_count();
    }
    return std::move(x.front());
  }

  std::vector<double> forward(const std::vector<std::vector<double>>& input) const {
    return forward(std::span<const double>(params_), input);
  }

 private:
  void validate_specs() const {
    if (layers_.empty()) throw model_error("ConvNet: empty layer list");
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const auto& l = layers_[k];
      if (l.in_channels < 1 || l.out_channels < 1 || l.kernel_size < 1)
        throw model_error("ConvNet: layer dimensions must be positive");
      if (l.kernel_size % 2 == 0) throw model_error("ConvNet: kernel size must be odd");
      if (k > 0 && l.in_channels != layers_[k - 1].out_channels)
        throw model_error("ConvNet: channel counts of consecutive layers disagree");
      bool last = k + 1 == layers_.size();
      if (last != (l.activation == Activation::Sigmoid))
        throw model_error("ConvNet: hidden layers use ELU and only the last layer uses sigmoid");
    }
    if (layers_.back().out_channels != 1) throw model_error("ConvNet: final layer must have one channel");
  }

  std::vector<ConvLayerSpec> layers_;
  std::vector<double> params_;
};

/// Hidden conv layers with ELU then a 1-channel sigmoid layer; input is the
/// two difference features.
inline ConvNet make_net(const std::vector<int>& kernels, const std::vector<int>& hidden_channels) {
  if (kernels.size() != hidden_channels.size() + 1)
    throw std::invalid_argument("make_net: need one kernel per hidden layer plus the output layer");
  std::vector<ConvLayerSpec> layers;
  int in = 2;
  for (std::size_t k = 0; k < hidden_channels.size(); ++k) {
    layers.push_back({in, hidden_channels[k], kernels[k], Activation::ELU});
    in = hidden_channels[k];
  }
  layers.push_back({in, 1, kernels.back(), Activation::Sigmoid});
  return ConvNet(std::move(layers));
}

/// fdiff1_i = f_{i+1} - f_{i-1}, fdiff2_i = f_{i+1} - 2 f_i + f_{i-1} for the
/// interior points of `f` (output length f.size() - 2).
template <class T>
std::vector<std::vector<T>> features(std::span<const T> f) {
  if (f.size() < 3) throw std::invalid_argument("features: need at least three values");
  const std::size_t n = f.size() - 2;
  std::vector<std::vector<T>> out(2, std::vector<T>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out[0][i] = f[i + 2] - f[i];
    out[1][i] = f[i + 2] - 2.0 * f[i + 1] + f[i];
  }
  return out;
}

/// (delta_{i-1}, delta_i, delta_{i+1}) for each node i; `delta` carries one
/// extra node on each side, so node i sits at delta[i + 1].
template <class T>
std::vector<Triple<T>> shift_multipliers(std::span<const T> delta) {
  if (delta.size() < 3) throw std::invalid_argument("shift_multipliers: need one ghost node per side");
  std::vector<Triple<T>> out(delta.size() - 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {delta[i], delta[i + 1], delta[i + 2]};
  return out;
}

/// A pair of networks (positive / negative flux branch) and the offset C.
struct DsModel {
  ConvNet positive;
  ConvNet negative;
  double C = 0.1;

  int receptive_radius() const { return std::max(positive.receptive_radius(), negative.receptive_radius()); }
};

inline DsModel make_model(const std::vector<int>& kernels, const std::vector<int>& hidden_channels, double C = 0.1) {
  return DsModel{make_net(kernels, hidden_channels), make_net(kernels, hidden_channels), C};
}

/// Source of the per-node multiplier field used by WENO-DS.
///
/// `eval(extended, n)` receives one branch of the split flux with `ghost`
/// context values on each side of n interior nodes and returns delta for
/// nodes -1..n (length n + 2).
template <class T>
struct MultiplierSource {
  int ghost = 1;
  std::function<std::vector<T>(std::span<const T> extended, int n, Branch branch)> eval;
};

template <class T>
MultiplierSource<T> constant_multipliers(double delta) {
  return {1, [delta](std::span<const T>, int n, Branch) { return std::vector<T>(n + 2, T(delta)); }};
}

/// Multipliers from a model; `pos` / `neg` are the parameter vectors to use
/// (tape variables while training, the stored doubles otherwise).
template <class T>
MultiplierSource<T> net_multipliers(const DsModel& model, std::span<const T> pos, std::span<const T> neg) {
  const int ghost = model.receptive_radius() + 2;
  return {ghost, [&model, pos, neg, ghost](std::span<const T> ext, int n, Branch branch) {
            const ConvNet& net = branch == Branch::Positive ? model.positive : model.negative;
            std::span<const T> params = branch == Branch::Positive ? pos : neg;
            // The model may pair nets with different radii; trim to this net's context.
            const int need = net.receptive_radius() + 2;
            std::span<const T> window = ext.subspan(ghost - need, n + 2 * need);
            return net.forward(params, features(window));
          }};
}

inline MultiplierSource<double> net_multipliers(const DsModel& model) {
  return net_multipliers<double>(model, model.positive.params(), model.negative.params());
}

// ---- model file ----------------------------------------------------------

inline nlohmann::json net_to_json(const ConvNet& net) {
  nlohmann::json layers = nlohmann::json::array();
  std::size_t offset = 0;
  auto params = net.params();
  for (const auto& l : net.layers()) {
    nlohmann::json j;
    j["in_channels"] = l.in_channels;
    j["out_channels"] = l.out_channels;
    j["kernel_size"] = l.kernel_size;
    j["activation"] = l.activation == Activation::ELU ? "elu" : "sigmoid";
    j["weights"] = std::vector<double>(params.begin() + offset, params.begin() + offset + l.weight_count());
    j["bias"] = std::vector<double>(params.begin() + offset + l.weight_count(),
                                    params.begin() + offset + l.param_count());
    layers.push_back(std::move(j));
    offset += l.param_count();
  }
  return nlohmann::json{{"layers", layers}};
}

inline ConvNet net_from_json(const nlohmann::json& j) {
  try {
    const auto& layers = j.at("layers");
    if (!layers.is_array() || layers.empty()) throw model_error("model file: empty layer list");
    std::vector<ConvLayerSpec> specs;
    std::vector<double> params;
    for (const auto& l : layers) {
      ConvLayerSpec s;
      s.in_channels = l.at("in_channels").get<int>();
      s.out_channels = l.at("out_channels").get<int>();
      s.kernel_size = l.at("kernel_size").get<int>();
      std::string act = l.at("activation").get<std::string>();
      if (act == "elu") {
        s.activation = Activation::ELU;
      } else if (act == "sigmoid") {
        s.activation = Activation::Sigmoid;
      } else {
        throw model_error("model file: unknown activation '" + act + "'");
      }
      const auto& w = l.at("weights");
      const auto& b = l.at("bias");
      if (!w.is_array() || static_cast<int>(w.size()) != s.weight_count())
        throw model_error("model file: weight array does not match the declared layer shape");
      if (!b.is_array() || static_cast<int>(b.size()) != s.out_channels)
        throw model_error("model file: bias array does not match the declared layer shape");
      for (const auto& v : w) {
        if (!v.is_number()) throw model_error("model file: non-numeric or non-finite weight");
        params.push_back(v.get<double>());
      }
      for (const auto& v : b) {
        if (!v.is_number()) throw model_error("model file: non-numeric or non-finite bias");
        params.push_back(v.get<double>());
      }
      specs.push_back(s);
    }
    ConvNet net(std::move(specs));
    net.set_params(std::move(params));
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw model_error(std::string("model file: ") + e.what());
  }
}

inline constexpr int kModelFormatVersion = 1;

inline std::string model_to_string(const DsModel& model) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["C"] = model.C;
  j["positive"] = net_to_json(model.positive);
  j["negative"] = net_to_json(model.negative);
  return j.dump(1) + "\n";
}

inline DsModel model_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw model_error(std::string("model file: ") + e.what());
  }
  if (!j.is_object()) throw model_error("model file: expected an object");
  if (!j.contains("format_version") || j["format_version"] != kModelFormatVersion)
    throw model_error("model file: unsupported format version");
  if (!j.contains("C") || !j["C"].is_number() || !(j["C"].get<double>() > 0.0))
    throw model_error("model file: C must be a positive number");
  if (!j.contains("positive") || !j.contains("negative")) throw model_error("model file: missing network");
  return DsModel{net_from_json(j["positive"]), net_from_json(j["negative"]), j["C"].get<double>()};
}

inline void save_model(const DsModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw model_error("cannot write model file " + path);
  out << model_to_string(model);
}

inline DsModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw model_error("cannot read model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_string(ss.str());
}

}  // namespace wenods
