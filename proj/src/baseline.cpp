#include "newsrnn/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "newsrnn/errors.hpp"
#include "newsrnn/random.hpp"

namespace newsrnn {

std::vector<LagSample> build_lag_samples(const FeatureSequence& features, bool with_news) {
  std::vector<LagSample> out;
  const auto& steps = features.steps;
  for (std::size_t t = kPriceLags - 1; t < steps.size(); ++t) {
    if (!steps[t].next_label) continue;
    LagSample s;
    s.step = t;
    s.x = {steps[t - 2].ret, steps[t - 1].ret, steps[t].ret};
    if (with_news) s.x.insert(s.x.end(), steps[t].hist.begin(), steps[t].hist.end());
    s.y = *steps[t].next_label == 1 ? 1 : -1;
    out.push_back(std::move(s));
  }
  if (out.empty()) {
    throw DataError("stock " + features.stock_id + ": too few days for " +
                    std::to_string(kPriceLags) + "-lag samples");
  }
  return out;
}

namespace {

struct Scaling {
  std::vector<double> mean, scale;
};

Scaling fit_scaling(std::span<const LagSample> samples, std::size_t width) {
  Scaling s{std::vector<double>(width, 0.0), std::vector<double>(width, 1.0)};
  const double n = static_cast<double>(samples.size());
  for (const auto& x : samples) {
    for (std::size_t j = 0; j < width; ++j) s.mean[j] += x.x[j];
  }
  for (auto& m : s.mean) m /= n;
  std::vector<double> var(width, 0.0);
  for (const auto& x : samples) {
    for (std::size_t j = 0; j < width; ++j) {
      const double d = x.x[j] - s.mean[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < width; ++j) {
    const double sd = std::sqrt(var[j] / n);
    s.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

double objective(const std::vector<std::vector<double>>& z, std::span<const LagSample> samples,
                 const std::vector<double>& v, double c, double l2) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double m = c;
    for (std::size_t j = 0; j < v.size(); ++j) m += v[j] * z[i][j];
    hinge += std::max(0.0, 1.0 - samples[i].y * m);
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  return hinge / static_cast<double>(z.size()) + 0.5 * l2 * norm;
}

}  // namespace

LinearModel train_linear(std::span<const LagSample> samples, const LinearHyperparams& hyper) {
  if (samples.empty()) throw DataError("cannot train a linear model without samples");
  const std::size_t width = samples.front().x.size();
  for (const auto& s : samples) {
    if (s.x.size() != width) throw DataError("linear samples have inconsistent widths");
  }
  if (!(hyper.l2 > 0.0) || !(hyper.learning_rate > 0.0)) {
    throw std::invalid_argument("linear model needs positive l2 and learning rate");
  }

  LinearModel model;
  model.hyper = hyper;
  model.w.assign(width, 0.0);

  std::size_t ups = 0;
  for (const auto& s : samples) ups += s.y > 0 ? 1 : 0;
  if (samples.size() < 2 || ups == 0 || ups == samples.size()) {
    model.degenerate = true;
    model.b = 2 * ups > samples.size() ? 1.0 : -1.0;
    return model;
  }

  const Scaling scaling = fit_scaling(samples, width);
  std::vector<std::vector<double>> z(samples.size(), std::vector<double>(width));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      z[i][j] = (samples[i].x[j] - scaling.mean[j]) / scaling.scale[j];
    }
  }

  Rng rng(mix_seed(hyper.seed, 2));
  std::vector<double> v(width, 0.0), best_v(width, 0.0);
  double c = 0.0, best_c = 0.0;
  double best = objective(z, samples, v, c, hyper.l2);
  std::vector<std::size_t> order(samples.size());
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);
    for (std::size_t i : order) {
      const double eta = hyper.learning_rate / (1.0 + hyper.learning_rate * hyper.l2 * static_cast<double>(t++));
      double m = c;
      for (std::size_t j = 0; j < width; ++j) m += v[j] * z[i][j];
      const double y = samples[i].y;
      for (auto& x : v) x *= 1.0 - eta * hyper.l2;
      if (y * m < 1.0) {
        for (std::size_t j = 0; j < width; ++j) v[j] += eta * y * z[i][j];
        c += eta * y;
      }
    }
    const double obj = objective(z, samples, v, c, hyper.l2);
    if (obj < best) {
      best = obj;
      best_v = v;
      best_c = c;
    }
    model.objective_trace.push_back(best);
  }

  model.b = best_c;
  for (std::size_t j = 0; j < width; ++j) {
    model.w[j] = best_v[j] / scaling.scale[j];
    model.b -= best_v[j] * scaling.mean[j] / scaling.scale[j];
  }
  return model;
}

int predict_linear(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.w.size()) {
    throw std::invalid_argument("feature width " + std::to_string(x.size()) +
                                " does not match model width " + std::to_string(model.w.size()));
  }
  double m = model.b;
  for (std::size_t j = 0; j < x.size(); ++j) m += model.w[j] * x[j];
  return m > 0.0 ? 1 : 0;
}

void write_linear_tsv(std::ostream& out, const LinearModel& model) {
  char buf[32];
  for (std::size_t j = 0; j < model.w.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", model.w[j]);
    out << "w_" << (j + 1) << '\t' << buf << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.17g", model.b);
  out << "b\t" << buf << '\n';
}

LinearModel read_linear_tsv(std::istream& in) {
  LinearModel model;
  std::string line;
  bool have_bias = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (have_bias) throw DataError("linear model: entries after the bias line");
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("linear model: missing tab in '" + line + "'");
    const std::string key = line.substr(0, tab);
    double value = 0.0;
    try {
      value = std::stod(line.substr(tab + 1));
    } catch (const std::logic_error&) {
      throw DataError("linear model: bad value in '" + line + "'");
    }
    if (key == "b") {
      model.b = value;
      have_bias = true;
    } else if (key == "w_" + std::to_string(model.w.size() + 1)) {
      model.w.push_back(value);
    } else {
      throw DataError("linear model: unexpected key '" + key + "'");
    }
  }
  if (!have_bias) throw DataError("linear model: missing bias line");
  return model;
}

}  // namespace newsrnn
