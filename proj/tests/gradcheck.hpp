// Finite-difference check of backward() on random small networks.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "newsrnn/model.hpp"
#include "oracles.hpp"

namespace gradcheck {

struct Instance {
  newsrnn::RnnParams params;
  std::vector<double> rets;
  std::vector<std::vector<double>> hists;
  std::vector<int> labels;
  newsrnn::RegularizationOptions reg;
};

inline Instance random_instance(std::uint64_t seed, std::size_t steps = 4,
                                newsrnn::RnnDims dims = {3, 2, 3, 3}) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Instance inst;
  inst.params = newsrnn::init_params(dims, seed);
  // Non-zero biases so their gradients are exercised too.
  for (std::size_t i = 0; i < newsrnn::RnnParams::kTensorCount; ++i)
    if (newsrnn::RnnParams::is_bias(i))
      for (auto& b : inst.params.tensors()[i]->data) b = 0.5 * u(gen);
  for (std::size_t t = 0; t < steps; ++t) {
    inst.rets.push_back(0.5 * u(gen));
    std::vector<double> h(dims.news_width);
    double total = 0;
    for (auto& x : h) total += (x = std::abs(u(gen)));
    for (auto& x : h) x /= total;
    inst.hists.push_back(h);
    inst.labels.push_back(static_cast<int>(gen() & 1u));
  }
  inst.reg.l2 = 0.05 * std::abs(u(gen));
  inst.reg.include_biases = (gen() & 1u) != 0;
  return inst;
}

// Signs of every pre-activation, to detect when a perturbation crosses a kink.
inline std::vector<bool> relu_pattern(const newsrnn::ForwardTrace& tr) {
  std::vector<bool> out;
  for (const auto& s : tr.steps) {
    for (double v : s.price_pre) out.push_back(v > 0);
    for (double v : s.news_pre) out.push_back(v > 0);
    for (double v : s.fusion_pre) out.push_back(v > 0);
  }
  return out;
}

inline double min_abs_pre(const newsrnn::ForwardTrace& tr) {
  double m = INFINITY;
  for (const auto& s : tr.steps) {
    for (double v : s.price_pre) m = std::min(m, std::abs(v));
    for (double v : s.news_pre) m = std::min(m, std::abs(v));
    for (double v : s.fusion_pre) m = std::min(m, std::abs(v));
  }
  return m;
}

struct Result {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // coordinates whose perturbation reaches a kink
};

// Relative error |a - n| / max(|a|, |n|, floor); the floor keeps numerically
// zero gradients from amplifying finite-difference round-off.
inline Result check(Instance inst, double h = 1e-5, double kink = 1e-7, double floor = 1e-6) {
  using namespace newsrnn;
  const auto base = forward(inst.params, inst.rets, inst.hists);
  const auto analytic = backward(inst.params, base, inst.labels, inst.reg);
  const auto pattern = relu_pattern(base);
  const bool base_near_kink = min_abs_pre(base) < kink;

  Result res;
  auto tensors = inst.params.tensors();
  auto grads = analytic.tensors();
  for (std::size_t ti = 0; ti < RnnParams::kTensorCount; ++ti) {
    for (std::size_t k = 0; k < tensors[ti]->size(); ++k) {
      double& x = tensors[ti]->data[k];
      bool crosses = base_near_kink;
      auto f = [&] {
        auto tr = forward(inst.params, inst.rets, inst.hists);
        if (relu_pattern(tr) != pattern) crosses = true;
        return loss(inst.params, tr, inst.labels, inst.reg);
      };
      const double numeric = oracle::central_difference(f, x, h);
      if (crosses) {
        ++res.skipped;
        continue;
      }
      const double a = grads[ti]->data[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      res.max_rel_error = std::max(res.max_rel_error, std::abs(a - numeric) / denom);
      ++res.checked;
    }
  }
  return res;
}

}  // namespace gradcheck
