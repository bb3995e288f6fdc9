#include "maskstream/model/network.hpp"

#include <algorithm>
#include <stdexcept>

#include "maskstream/nn/checkpoint.hpp"
#include "maskstream/rng.hpp"

namespace maskstream::model {

template <typename T>
Network<T> Network<T>::build(const ModelConfig& cfg, uint64_t seed, int bins) {
  validate_model_config(cfg);
  if (bins <= 0) throw std::invalid_argument("network: bins must be positive");
  Network net;
  net.config = cfg;
  net.bins = bins;
  net.feat_channels = cfg.feature_channels();
  Rng rng(seed);
  int ci = net.feat_channels;
  for (const auto& s : conv_stack(cfg.conv_config, cfg.causal)) {
    nn::Conv2d<T> layer;
    layer.init(s, ci, rng);
    ci = s.filters;
    net.convs.push_back(std::move(layer));
  }
  int d = bins * ci;
  for (int i = 0; i < cfg.blstm_depth; ++i) {
    nn::RecurrentLayerSpec rs{cfg.blstm_width, !cfg.causal, true};
    nn::LstmBlock<T> block;
    block.init(rs, d, rng);
    d = block.out_dim();
    net.lstms.push_back(std::move(block));
  }
  for (int i = 0; i < cfg.fc_depth; ++i) {
    nn::Dense<T> layer;
    layer.init({cfg.fc_width, nn::Activation::Relu}, d, rng);
    d = cfg.fc_width;
    net.fcs.push_back(std::move(layer));
  }
  net.head.init({bins, nn::Activation::Sigmoid}, d, rng);
  return net;
}

template <typename T>
int Network<T>::flat_dim() const {
  int ci = convs.empty() ? feat_channels : convs.back().spec.filters;
  return bins * ci;
}

template <typename T>
nn::Tensor<T> Network<T>::forward(const nn::Tensor<T>& features, Trace* trace) const {
  if (features.rank() != 3 || features.dim(1) != bins ||
      features.dim(2) != feat_channels) {
    throw std::invalid_argument("network: feature shape mismatch");
  }
  Trace local;
  Trace& tr = trace != nullptr ? *trace : local;
  tr.input = features;
  tr.conv_out.clear();
  const nn::Tensor<T>* cur = &tr.input;
  for (const auto& layer : convs) {
    tr.conv_out.push_back(layer.forward(*cur));
    cur = &tr.conv_out.back();
  }
  // [T][F][C] rows are already contiguous frequency-major, so the flatten to
  // [T][F*C] is just a reshape.
  tr.flat = cur->reshaped({features.dim(0), flat_dim()});
  cur = &tr.flat;
  tr.lstm_out.clear();
  tr.lstm_cache.assign(lstms.size(), {});
  for (size_t i = 0; i < lstms.size(); ++i) {
    tr.lstm_out.push_back(lstms[i].forward(*cur, &tr.lstm_cache[i]));
    cur = &tr.lstm_out.back();
  }
  tr.fc_out.clear();
  for (const auto& layer : fcs) {
    tr.fc_out.push_back(layer.forward(*cur));
    cur = &tr.fc_out.back();
  }
  tr.mask = head.forward(*cur);
  return tr.mask;
}

template <typename T>
nn::Tensor<T> Network<T>::backward(const Trace& tr, const nn::Tensor<T>& gmask) {
  auto fc_input = [&](size_t i) -> const nn::Tensor<T>& {
    if (i > 0) return tr.fc_out[i - 1];
    return lstms.empty() ? tr.flat : tr.lstm_out.back();
  };
  const nn::Tensor<T>& head_in = fcs.empty() ? fc_input(0) : tr.fc_out.back();
  nn::Tensor<T> g = head.backward(head_in, tr.mask, gmask);
  for (size_t i = fcs.size(); i-- > 0;) {
    g = fcs[i].backward(fc_input(i), tr.fc_out[i], g);
  }
  for (size_t i = lstms.size(); i-- > 0;) {
    const nn::Tensor<T>& xin = i > 0 ? tr.lstm_out[i - 1] : tr.flat;
    g = lstms[i].backward(xin, tr.lstm_cache[i], g);
  }
  int ci = convs.empty() ? feat_channels : convs.back().spec.filters;
  g = g.reshaped({tr.input.dim(0), bins, ci});
  for (size_t i = convs.size(); i-- > 0;) {
    const nn::Tensor<T>& xin = i > 0 ? tr.conv_out[i - 1] : tr.input;
    g = convs[i].backward(xin, tr.conv_out[i], g);
  }
  return g;
}

template <typename T>
std::vector<nn::ParamRef<T>> Network<T>::param_refs() {
  std::vector<nn::ParamRef<T>> out;
  for (size_t i = 0; i < convs.size(); ++i) convs[i].collect("conv" + std::to_string(i), out);
  for (size_t i = 0; i < lstms.size(); ++i) lstms[i].collect("lstm" + std::to_string(i), out);
  for (size_t i = 0; i < fcs.size(); ++i) fcs[i].collect("fc" + std::to_string(i), out);
  head.collect("head", out);
  return out;
}

template <typename T>
void Network<T>::zero_grads() {
  for (auto& c : convs) c.zero_grads();
  for (auto& l : lstms) l.zero_grads();
  for (auto& f : fcs) f.zero_grads();
  head.zero_grads();
}

template <typename T>
long long Network<T>::param_count() const {
  long long n = 0;
  for (const auto& c : convs) {
    n += static_cast<long long>(c.w.numel()) + static_cast<long long>(c.b.numel());
  }
  for (const auto& l : lstms) {
    n += static_cast<long long>(l.fwd.wx.numel() + l.fwd.wh.numel() + l.fwd.b.numel());
    if (l.spec.bidirectional) {
      n += static_cast<long long>(l.bwd.wx.numel() + l.bwd.wh.numel() + l.bwd.b.numel());
    }
    if (l.has_proj) n += static_cast<long long>(l.proj_w.numel());
  }
  for (const auto& f : fcs) {
    n += static_cast<long long>(f.w.numel()) + static_cast<long long>(f.b.numel());
  }
  n += static_cast<long long>(head.w.numel()) + static_cast<long long>(head.b.numel());
  return n;
}

template struct Network<float>;
template struct Network<double>;

void save_network(const std::string& path, Network<float>& net) {
  std::vector<std::pair<std::string, const nn::TensorF*>> tensors;
  for (const auto& ref : net.param_refs()) tensors.emplace_back(ref.name, ref.value);
  nn::save_checkpoint(path, serialize_model_config(net.config), tensors);
}

Network<float> load_network(const std::string& path) {
  nn::Checkpoint ck = nn::load_checkpoint(path);
  ModelConfig cfg = parse_model_config(ck.config_text);
  int bins = 257;
  if (const auto* e = ck.find("head.b"); e != nullptr && e->shape.size() == 1) {
    bins = e->shape[0];
  }
  Network<float> net = Network<float>::build(cfg, 0, bins);
  auto refs = net.param_refs();
  if (refs.size() != ck.entries.size()) {
    throw std::runtime_error("checkpoint: tensor count does not match the config");
  }
  for (auto& ref : refs) {
    const nn::CheckpointEntry* e = ck.find(ref.name);
    if (e == nullptr) throw std::runtime_error("checkpoint: missing tensor " + ref.name);
    if (e->shape != ref.value->shape) {
      throw std::runtime_error("checkpoint: shape mismatch for " + ref.name);
    }
    const float* src = ck.tensor_data(*e);
    std::copy(src, src + e->numel(), ref.value->v.begin());
  }
  return net;
}

}  // namespace maskstream::model
