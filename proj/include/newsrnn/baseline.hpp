#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "newsrnn/features.hpp"

namespace newsrnn {

inline constexpr std::size_t kPriceLags = 3;

// Features for predicting the day after step `step`: the returns of steps
// step-2, step-1, step and, with news, the histogram of `step`.
struct LagSample {
  std::size_t step = 0;
  std::vector<double> x;
  int y = -1;  // +1 up, -1 down/unchanged
};

// One sample per labelled step with two earlier steps available. Throws
// DataError if the sequence yields no sample.
std::vector<LagSample> build_lag_samples(const FeatureSequence& features, bool with_news);

struct LinearHyperparams {
  double l2 = 1e-3;           // weight of (1/2)||w||^2 next to the mean hinge loss
  double learning_rate = 0.1; // initial step; decays as lr / (1 + lr * l2 * t)
  std::size_t epochs = 50;
  std::uint64_t seed = 7;
};

// sign(w.x + b) classifier. `degenerate` marks a constant majority-vote model
// fitted when only one class was present.
struct LinearModel {
  std::vector<double> w;
  double b = 0.0;
  bool degenerate = false;
  LinearHyperparams hyper;
  // Best objective seen after each epoch (non-increasing).
  std::vector<double> objective_trace;
};

// Hinge-loss linear classifier trained by seeded subgradient descent on
// standardized features; the returned weights are mapped back to raw units.
// Throws DataError on empty input or inconsistent feature widths.
LinearModel train_linear(std::span<const LagSample> samples, const LinearHyperparams& hyper);

// 1 if w.x + b > 0, else 0. Throws std::invalid_argument on a width mismatch.
int predict_linear(const LinearModel& model, std::span<const double> x);

// TSV: `w_<i>\t<value>` per weight, then `b\t<value>`.
void write_linear_tsv(std::ostream& out, const LinearModel& model);
LinearModel read_linear_tsv(std::istream& in);

}  // namespace newsrnn
