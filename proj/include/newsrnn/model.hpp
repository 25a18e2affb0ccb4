#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "newsrnn/tensor.hpp"

namespace newsrnn {

struct RnnDims {
  std::size_t news_width = 10;    // L, histogram bins
  std::size_t price_hidden = 8;   // H_r
  std::size_t news_hidden = 16;   // H_f
  std::size_t fusion_hidden = 16; // H

  bool valid() const { return news_width && price_hidden && news_hidden && fusion_hidden; }
  friend bool operator==(const RnnDims&, const RnnDims&) = default;
};

// Two-branch recurrent network:
//   hr_i = ReLU(price_in * r_i + price_bias)
//   hf_i = ReLU(news_in * f_i + news_recur * hf_{i-1} + news_bias),  hf_0 = 0
//   h_i  = ReLU(fuse_price * hr_i + fuse_news * hf_i + fuse_bias)
//   y_i  = Softmax(out * h_i)          (no output bias)
// y_i[1] is the probability that day i + 1 closes up.
struct RnnParams {
  RnnDims dims;
  Matrix price_in;    // H_r x 1     (W_r)
  Matrix price_bias;  // H_r x 1     (b_hr)
  Matrix news_in;     // H_f x L     (W_f)
  Matrix news_recur;  // H_f x H_f   (V_hf)
  Matrix news_bias;   // H_f x 1     (b_hf)
  Matrix fuse_price;  // H x H_r     (W_hr)
  Matrix fuse_news;   // H x H_f     (W_hf)
  Matrix fuse_bias;   // H x 1       (b_h)
  Matrix out;         // 2 x H       (W_h)

  static constexpr std::size_t kTensorCount = 9;

  // Zero-filled parameters of the given shape.
  static RnnParams zeros(const RnnDims& dims);

  // Tensors in canonical (checkpoint) order with their names.
  std::array<Matrix*, kTensorCount> tensors();
  std::array<const Matrix*, kTensorCount> tensors() const;
  static const std::array<std::string_view, kTensorCount>& tensor_names();
  static bool is_bias(std::size_t tensor_index);

  bool same_shape(const RnnParams& o) const;
  bool all_finite() const;
  friend bool operator==(const RnnParams&, const RnnParams&) = default;
};

// Glorot-uniform weights, zero biases; deterministic in seed.
RnnParams init_params(const RnnDims& dims, std::uint64_t seed);

struct StepTrace {
  double ret = 0.0;                             // inputs of this step
  std::vector<double> hist;
  std::vector<double> price_pre, price_hidden;  // W_r r + b, ReLU of it
  std::vector<double> news_pre, news_hidden;
  std::vector<double> fusion_pre, fusion_hidden;
  std::array<double, 2> logits{};
  std::array<double, 2> probs{};
};

struct ForwardTrace {
  std::vector<double> initial_news_state;  // hf_0
  std::vector<StepTrace> steps;

  std::size_t size() const { return steps.size(); }
  const std::vector<double>& final_news_state() const {
    return steps.empty() ? initial_news_state : steps.back().news_hidden;
  }
};

// Throws std::invalid_argument on length or width mismatch or an empty input.
// `initial_news_state` defaults to the zero vector.
ForwardTrace forward(const RnnParams& params, std::span<const double> ret_seq,
                     std::span<const std::vector<double>> hist_seq,
                     std::span<const double> initial_news_state = {});

// Numerically stable two-way softmax.
std::array<double, 2> softmax2(const std::array<double, 2>& logits);

inline constexpr double kLogClamp = 1e-12;

struct RegularizationOptions {
  double l2 = 0.0;
  bool include_biases = false;
};

double l2_penalty(const RnnParams& params, const RegularizationOptions& reg);

// Summed cross-entropy of the up-probabilities against labels (one per step),
// plus the L2 penalty. Log arguments are clamped below at kLogClamp.
double loss(const RnnParams& params, const ForwardTrace& trace, std::span<const int> labels,
            const RegularizationOptions& reg);

// Exact gradient of loss() through the whole trace (ReLU'(0) = 0; a clamped
// log term contributes no gradient). Result has the shapes of params.
RnnParams backward(const RnnParams& params, const ForwardTrace& trace, std::span<const int> labels,
                   const RegularizationOptions& reg);

struct Prediction {
  int label = 0;
  double up_probability = 0.5;
};

// Class 1 only when y[1] is strictly greater than y[0].
Prediction predict_from_probs(const std::array<double, 2>& probs);
Prediction predict(const RnnParams& params, std::span<const double> ret_seq,
                   std::span<const std::vector<double>> hist_seq);

struct TrainConfig {
  double learning_rate = 0.01;
  double lr_decay = 0.95;        // multiplier applied after each epoch
  double l2 = 1e-4;
  bool regularize_biases = false;
  std::size_t epochs = 50;
  std::uint64_t seed = 42;
  std::optional<double> clip_norm = 5.0;
  std::optional<std::size_t> truncation = 32;  // steps per update; news state carries over
};

// One training sequence: per-step return, histogram and next-day label.
struct TrainSequence {
  std::vector<double> rets;
  std::vector<std::vector<double>> hists;
  std::vector<int> labels;
};

struct TrainResult {
  RnnParams params;
  std::vector<double> epoch_loss;  // mean loss per SGD update, per epoch
};

// Plain SGD. Each epoch shuffles sequence order with the seeded generator and
// walks every sequence front to back in truncation windows, one update per
// window. Throws DivergenceError if the loss becomes non-finite.
TrainResult train(const std::vector<TrainSequence>& sequences, const RnnDims& dims,
                  const TrainConfig& config);
TrainResult train(const std::vector<TrainSequence>& sequences, RnnParams initial,
                  const TrainConfig& config);

}  // namespace newsrnn
