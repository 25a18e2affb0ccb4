#include "newsrnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "newsrnn/errors.hpp"
#include "newsrnn/random.hpp"

namespace newsrnn {

namespace {

double relu(double x) { return x > 0.0 ? x : 0.0; }

void relu_into(const std::vector<double>& pre, std::vector<double>& out) {
  out.resize(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) out[i] = relu(pre[i]);
}

// grad *= ReLU'(pre), with the derivative at 0 taken as 0.
void mask_relu(std::vector<double>& grad, const std::vector<double>& pre) {
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(pre[i] > 0.0)) grad[i] = 0.0;
  }
}

void add_bias(std::vector<double>& v, const Matrix& bias) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += bias.data[i];
}

void add_to(Matrix& g, std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) g.data[i] += v[i];
}

void check_sequence(const RnnParams& params, std::span<const double> ret_seq,
                    std::span<const std::vector<double>> hist_seq,
                    std::span<const double> initial_news_state) {
  if (ret_seq.empty()) throw std::invalid_argument("forward needs at least one step");
  if (ret_seq.size() != hist_seq.size()) {
    throw std::invalid_argument("return and histogram sequences differ in length (" +
                                std::to_string(ret_seq.size()) + " vs " +
                                std::to_string(hist_seq.size()) + ")");
  }
  for (const auto& h : hist_seq) {
    if (h.size() != params.dims.news_width) {
      throw std::invalid_argument("histogram width " + std::to_string(h.size()) +
                                  " does not match model width " +
                                  std::to_string(params.dims.news_width));
    }
  }
  if (!initial_news_state.empty() && initial_news_state.size() != params.dims.news_hidden) {
    throw std::invalid_argument("initial news state has the wrong width");
  }
}

}  // namespace

RnnParams RnnParams::zeros(const RnnDims& dims) {
  if (!dims.valid()) throw std::invalid_argument("all RNN widths must be positive");
  RnnParams p;
  p.dims = dims;
  p.price_in = Matrix(dims.price_hidden, 1);
  p.price_bias = Matrix(dims.price_hidden, 1);
  p.news_in = Matrix(dims.news_hidden, dims.news_width);
  p.news_recur = Matrix(dims.news_hidden, dims.news_hidden);
  p.news_bias = Matrix(dims.news_hidden, 1);
  p.fuse_price = Matrix(dims.fusion_hidden, dims.price_hidden);
  p.fuse_news = Matrix(dims.fusion_hidden, dims.news_hidden);
  p.fuse_bias = Matrix(dims.fusion_hidden, 1);
  p.out = Matrix(2, dims.fusion_hidden);
  return p;
}

std::array<Matrix*, RnnParams::kTensorCount> RnnParams::tensors() {
  return {&price_in, &price_bias, &news_in,  &news_recur, &news_bias,
          &fuse_price, &fuse_news, &fuse_bias, &out};
}

std::array<const Matrix*, RnnParams::kTensorCount> RnnParams::tensors() const {
  return {&price_in, &price_bias, &news_in,  &news_recur, &news_bias,
          &fuse_price, &fuse_news, &fuse_bias, &out};
}

const std::array<std::string_view, RnnParams::kTensorCount>& RnnParams::tensor_names() {
  static const std::array<std::string_view, kTensorCount> names = {
      "price_in",   "price_bias", "news_in",   "news_recur", "news_bias",
      "fuse_price", "fuse_news",  "fuse_bias", "out"};
  return names;
}

bool RnnParams::is_bias(std::size_t tensor_index) {
  return tensor_index == 1 || tensor_index == 4 || tensor_index == 7;
}

bool RnnParams::same_shape(const RnnParams& o) const {
  auto a = tensors();
  auto b = o.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    if (!a[i]->same_shape(*b[i])) return false;
  }
  return true;
}

bool RnnParams::all_finite() const {
  for (const auto* m : tensors()) {
    for (double v : m->data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

RnnParams init_params(const RnnDims& dims, std::uint64_t seed) {
  RnnParams p = RnnParams::zeros(dims);
  Rng rng(mix_seed(seed, 0));
  auto tensors = p.tensors();
  for (std::size_t i = 0; i < RnnParams::kTensorCount; ++i) {
    if (RnnParams::is_bias(i)) continue;
    Matrix& m = *tensors[i];
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
    for (auto& v : m.data) v = uniform(rng, -limit, limit);
  }
  return p;
}

std::array<double, 2> softmax2(const std::array<double, 2>& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double s = e0 + e1;
  return {e0 / s, e1 / s};
}

ForwardTrace forward(const RnnParams& params, std::span<const double> ret_seq,
                     std::span<const std::vector<double>> hist_seq,
                     std::span<const double> initial_news_state) {
  check_sequence(params, ret_seq, hist_seq, initial_news_state);
  const auto& d = params.dims;
  ForwardTrace trace;
  if (initial_news_state.empty()) {
    trace.initial_news_state.assign(d.news_hidden, 0.0);
  } else {
    trace.initial_news_state.assign(initial_news_state.begin(), initial_news_state.end());
  }
  trace.steps.resize(ret_seq.size());

  const std::vector<double>* prev = &trace.initial_news_state;
  for (std::size_t i = 0; i < ret_seq.size(); ++i) {
    StepTrace& s = trace.steps[i];
    s.ret = ret_seq[i];
    s.hist = hist_seq[i];

    s.price_pre.assign(d.price_hidden, 0.0);
    for (std::size_t k = 0; k < d.price_hidden; ++k) s.price_pre[k] = params.price_in.data[k] * ret_seq[i];
    add_bias(s.price_pre, params.price_bias);
    relu_into(s.price_pre, s.price_hidden);

    s.news_pre.assign(d.news_hidden, 0.0);
    gemv_add(params.news_in, hist_seq[i], s.news_pre);
    gemv_add(params.news_recur, *prev, s.news_pre);
    add_bias(s.news_pre, params.news_bias);
    relu_into(s.news_pre, s.news_hidden);

    s.fusion_pre.assign(d.fusion_hidden, 0.0);
    gemv_add(params.fuse_price, s.price_hidden, s.fusion_pre);
    gemv_add(params.fuse_news, s.news_hidden, s.fusion_pre);
    add_bias(s.fusion_pre, params.fuse_bias);
    relu_into(s.fusion_pre, s.fusion_hidden);

    s.logits = {0.0, 0.0};
    gemv_add(params.out, s.fusion_hidden, s.logits);
    s.probs = softmax2(s.logits);

    prev = &s.news_hidden;
  }
  return trace;
}

double l2_penalty(const RnnParams& params, const RegularizationOptions& reg) {
  if (reg.l2 == 0.0) return 0.0;
  double sum = 0.0;
  auto tensors = params.tensors();
  for (std::size_t i = 0; i < RnnParams::kTensorCount; ++i) {
    if (RnnParams::is_bias(i) && !reg.include_biases) continue;
    sum += tensors[i]->squared_norm();
  }
  return reg.l2 * sum;
}

double loss(const RnnParams& params, const ForwardTrace& trace, std::span<const int> labels,
            const RegularizationOptions& reg) {
  if (labels.size() != trace.size()) {
    throw std::invalid_argument("label count does not match trace length");
  }
  double ce = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double p = trace.steps[i].probs[labels[i] == 1 ? 1 : 0];
    ce -= std::log(std::max(p, kLogClamp));
  }
  return ce + l2_penalty(params, reg);
}

RnnParams backward(const RnnParams& params, const ForwardTrace& trace, std::span<const int> labels,
                   const RegularizationOptions& reg) {
  if (labels.size() != trace.size()) {
    throw std::invalid_argument("label count does not match trace length");
  }
  const auto& d = params.dims;
  RnnParams g = RnnParams::zeros(d);

  std::vector<double> carry(d.news_hidden, 0.0);  // dL/dhf_i arriving from step i + 1
  std::vector<double> d_fusion(d.fusion_hidden), d_price(d.price_hidden), d_news(d.news_hidden);

  for (std::size_t i = trace.size(); i-- > 0;) {
    const StepTrace& s = trace.steps[i];
    const int c = labels[i] == 1 ? 1 : 0;
    std::array<double, 2> d_logits{0.0, 0.0};
    if (s.probs[c] >= kLogClamp) {
      d_logits = s.probs;
      d_logits[c] -= 1.0;
    }

    outer_add(g.out, d_logits, s.fusion_hidden);
    std::fill(d_fusion.begin(), d_fusion.end(), 0.0);
    gemv_t_add(params.out, d_logits, d_fusion);
    mask_relu(d_fusion, s.fusion_pre);

    outer_add(g.fuse_price, d_fusion, s.price_hidden);
    outer_add(g.fuse_news, d_fusion, s.news_hidden);
    add_to(g.fuse_bias, d_fusion);

    std::fill(d_price.begin(), d_price.end(), 0.0);
    gemv_t_add(params.fuse_price, d_fusion, d_price);
    mask_relu(d_price, s.price_pre);
    for (std::size_t k = 0; k < d.price_hidden; ++k) g.price_in.data[k] += d_price[k] * s.ret;
    add_to(g.price_bias, d_price);

    d_news = carry;
    gemv_t_add(params.fuse_news, d_fusion, d_news);
    mask_relu(d_news, s.news_pre);
    const std::vector<double>& prev =
        i == 0 ? trace.initial_news_state : trace.steps[i - 1].news_hidden;
    outer_add(g.news_in, d_news, s.hist);
    outer_add(g.news_recur, d_news, prev);
    add_to(g.news_bias, d_news);

    std::fill(carry.begin(), carry.end(), 0.0);
    gemv_t_add(params.news_recur, d_news, carry);
  }

  if (reg.l2 != 0.0) {
    auto gt = g.tensors();
    auto pt = params.tensors();
    for (std::size_t t = 0; t < RnnParams::kTensorCount; ++t) {
      if (RnnParams::is_bias(t) && !reg.include_biases) continue;
      for (std::size_t k = 0; k < gt[t]->size(); ++k) gt[t]->data[k] += 2.0 * reg.l2 * pt[t]->data[k];
    }
  }
  return g;
}

Prediction predict_from_probs(const std::array<double, 2>& probs) {
  return Prediction{probs[1] > probs[0] ? 1 : 0, probs[1]};
}

Prediction predict(const RnnParams& params, std::span<const double> ret_seq,
                   std::span<const std::vector<double>> hist_seq) {
  const auto trace = forward(params, ret_seq, hist_seq);
  return predict_from_probs(trace.steps.back().probs);
}

namespace {

void check_train_sequence(const TrainSequence& seq, const RnnDims& dims) {
  if (seq.rets.empty()) throw std::invalid_argument("training sequence is empty");
  if (seq.hists.size() != seq.rets.size() || seq.labels.size() != seq.rets.size()) {
    throw std::invalid_argument("training sequence fields differ in length");
  }
  for (const auto& h : seq.hists) {
    if (h.size() != dims.news_width) throw std::invalid_argument("histogram width mismatch");
  }
}

double global_norm(const RnnParams& g) {
  double s = 0.0;
  for (const auto* m : g.tensors()) s += m->squared_norm();
  return std::sqrt(s);
}

}  // namespace

TrainResult train(const std::vector<TrainSequence>& sequences, const RnnDims& dims,
                  const TrainConfig& config) {
  return train(sequences, init_params(dims, config.seed), config);
}

TrainResult train(const std::vector<TrainSequence>& sequences, RnnParams initial,
                  const TrainConfig& config) {
  if (sequences.empty()) throw std::invalid_argument("no training sequences");
  if (!(config.learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  if (!(config.l2 >= 0.0)) throw std::invalid_argument("L2 weight must be >= 0");
  if (config.truncation && *config.truncation == 0) {
    throw std::invalid_argument("truncation length must be positive");
  }
  for (const auto& s : sequences) check_train_sequence(s, initial.dims);

  const RegularizationOptions reg{config.l2, config.regularize_biases};
  TrainResult result{std::move(initial), {}};
  RnnParams& params = result.params;
  Rng rng(mix_seed(config.seed, 1));
  double lr = config.learning_rate;

  std::vector<std::size_t> order(sequences.size());
  std::vector<double> seq_loss(sequences.size());
  std::vector<std::size_t> seq_updates(sequences.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);
    for (std::size_t idx : order) {
      const auto& seq = sequences[idx];
      const std::size_t n = seq.rets.size();
      const std::size_t window = config.truncation ? *config.truncation : n;
      std::vector<double> state;
      seq_loss[idx] = 0.0;
      seq_updates[idx] = 0;
      for (std::size_t start = 0; start < n; start += window) {
        const std::size_t len = std::min(window, n - start);
        std::span<const double> rets(seq.rets.data() + start, len);
        std::span<const std::vector<double>> hists(seq.hists.data() + start, len);
        std::span<const int> labels(seq.labels.data() + start, len);

        const auto trace = forward(params, rets, hists, state);
        const double l = loss(params, trace, labels, reg);
        if (!std::isfinite(l)) {
          throw DivergenceError("training loss became non-finite at epoch " +
                                std::to_string(epoch) + " (learning rate " +
                                std::to_string(lr) + ")");
        }
        RnnParams grad = backward(params, trace, labels, reg);
        double scale = lr;
        if (config.clip_norm) {
          const double norm = global_norm(grad);
          if (norm > *config.clip_norm) scale *= *config.clip_norm / norm;
        }
        auto pt = params.tensors();
        auto gt = grad.tensors();
        for (std::size_t t = 0; t < RnnParams::kTensorCount; ++t) {
          for (std::size_t k = 0; k < pt[t]->size(); ++k) pt[t]->data[k] -= scale * gt[t]->data[k];
        }
        if (!params.all_finite()) {
          throw DivergenceError("parameters became non-finite at epoch " + std::to_string(epoch));
        }
        state = trace.final_news_state();
        seq_loss[idx] += l;
        ++seq_updates[idx];
      }
    }
    // Summed in sequence-index order so the figure does not depend on the shuffle.
    double total = 0.0;
    std::size_t updates = 0;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
      total += seq_loss[i];
      updates += seq_updates[i];
    }
    result.epoch_loss.push_back(total / static_cast<double>(updates));
    lr *= config.lr_decay;
  }
  return result;
}

}  // namespace newsrnn
