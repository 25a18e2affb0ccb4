#include "newsrnn/features.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "newsrnn/errors.hpp"

namespace newsrnn {

double HistogramSpec::edge(std::size_t j) const {
  if (j == bins) return max_polarity;
  return min_polarity + (max_polarity - min_polarity) * static_cast<double>(j) /
                            static_cast<double>(bins);
}

std::vector<double> HistogramSpec::edges() const {
  std::vector<double> out(bins + 1);
  for (std::size_t j = 0; j <= bins; ++j) out[j] = edge(j);
  return out;
}

std::size_t HistogramSpec::bin_of(double polarity) const {
  if (degenerate()) return 0;
  // Count interior edges at or below the value; binary search keeps the
  // assignment consistent with edge() bit for bit.
  std::size_t lo = 1, hi = bins;  // search interior edges [1, bins)
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (edge(mid) <= polarity) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo - 1;
}

HistogramSpec make_spec(const PolarityLexicon& lexicon, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (lexicon.empty()) throw std::invalid_argument("cannot size a histogram on an empty lexicon");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [token, score] : lexicon.scores()) {
    lo = std::min(lo, score);
    hi = std::max(hi, score);
  }
  return HistogramSpec{bins, lo, hi};
}

std::vector<double> histogram(const HistogramSpec& spec, const PolarityLexicon& lexicon,
                              std::span<const std::string> tokens, HistogramNorm norm) {
  std::vector<double> counts(spec.bins, 0.0);
  std::size_t known = 0;
  for (const auto& t : tokens) {
    auto p = lexicon.polarity(t);
    if (!p) continue;
    counts[spec.bin_of(*p)] += 1.0;
    ++known;
  }
  if (known == 0) return counts;
  const double denom =
      static_cast<double>(norm == HistogramNorm::kInVocabulary ? known : tokens.size());
  for (auto& c : counts) c /= denom;
  return counts;
}

std::vector<double> returns(std::span<const double> closes) {
  if (closes.size() < 2) throw DataError("returns need at least two prices");
  for (double p : closes) {
    if (!(p > 0.0)) throw DataError("prices must be positive to compute returns");
  }
  std::vector<double> out(closes.size() - 1);
  for (std::size_t i = 1; i < closes.size(); ++i) {
    out[i - 1] = (closes[i] - closes[i - 1]) / closes[i - 1];
  }
  return out;
}

std::vector<int> labels(std::span<const double> closes) {
  if (closes.size() < 2) throw DataError("labels need at least two prices");
  std::vector<int> out(closes.size() - 1);
  for (std::size_t i = 1; i < closes.size(); ++i) out[i - 1] = closes[i] > closes[i - 1] ? 1 : 0;
  return out;
}

FeatureSequence assemble(const AlignedSeries& aligned, const PolarityLexicon& lexicon,
                         const HistogramSpec& spec, HistogramNorm norm) {
  const auto& days = aligned.days;
  if (days.size() < 3) {
    throw DataError("stock " + aligned.stock_id + " needs at least 3 trading days, has " +
                    std::to_string(days.size()));
  }
  std::vector<double> closes;
  closes.reserve(days.size());
  for (const auto& d : days) closes.push_back(d.close);
  const auto r = returns(closes);
  const auto c = labels(closes);

  FeatureSequence seq;
  seq.stock_id = aligned.stock_id;
  seq.bins = spec.bins;
  seq.steps.reserve(days.size() - 1);
  for (std::size_t t = 1; t < days.size(); ++t) {
    FeatureStep step;
    step.date = days[t].date;
    step.ret = r[t - 1];
    step.hist = histogram(spec, lexicon, days[t].news.tokens, norm);
    if (t < c.size()) step.next_label = c[t];
    seq.steps.push_back(std::move(step));
  }
  return seq;
}

void write_features_csv(std::ostream& out, const FeatureSequence& seq, bool header) {
  char buf[32];
  if (header) {
    out << "stock_id,date,r,c_next";
    for (std::size_t j = 1; j <= seq.bins; ++j) out << ",x_" << j;
    out << '\n';
  }
  for (const auto& step : seq.steps) {
    std::snprintf(buf, sizeof(buf), "%.17g", step.ret);
    out << seq.stock_id << ',' << to_string(step.date) << ',' << buf << ',';
    if (step.next_label) out << *step.next_label;
    for (double x : step.hist) {
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace newsrnn
