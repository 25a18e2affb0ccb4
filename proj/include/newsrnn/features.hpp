#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsrnn/corpus.hpp"
#include "newsrnn/lexicon.hpp"

namespace newsrnn {

// L equal-width polarity bins spanning [min_polarity, max_polarity]. Bins are
// half-open on the right except the last, which includes max_polarity. When
// the range is degenerate every polarity falls into bin 0.
struct HistogramSpec {
  std::size_t bins = 10;
  double min_polarity = 0.0;
  double max_polarity = 0.0;

  bool degenerate() const { return !(max_polarity > min_polarity); }
  // edge_j = min + j (max - min) / L for j = 0..L.
  double edge(std::size_t j) const;
  std::vector<double> edges() const;
  std::size_t bin_of(double polarity) const;
};

// How a day's bin counts are normalized.
enum class HistogramNorm {
  kInVocabulary,  // divide by in-lexicon token occurrences (mass sums to 1)
  kAllTokens,     // divide by all token occurrences including unknown ones
};

// Throws std::invalid_argument for L == 0 or an empty lexicon.
HistogramSpec make_spec(const PolarityLexicon& lexicon, std::size_t bins);

std::vector<double> histogram(const HistogramSpec& spec, const PolarityLexicon& lexicon,
                              std::span<const std::string> tokens,
                              HistogramNorm norm = HistogramNorm::kInVocabulary);

// r_i = (p_i - p_{i-1}) / p_{i-1}; output index i is trading day i + 1.
// Throws DataError for non-positive prices or fewer than two prices.
std::vector<double> returns(std::span<const double> closes);

// 1 if the close rose versus the prior day, else 0; index i is day i + 1.
std::vector<int> labels(std::span<const double> closes);

// Inputs for one trading day t >= 2: its return, its news histogram and the
// direction of day t + 1 when that day exists.
struct FeatureStep {
  Date date;
  double ret = 0.0;
  std::vector<double> hist;
  std::optional<int> next_label;
};

struct FeatureSequence {
  std::string stock_id;
  std::size_t bins = 0;
  std::vector<FeatureStep> steps;

  std::size_t size() const { return steps.size(); }
};

// Throws DataError if the aligned series has fewer than 3 days.
FeatureSequence assemble(const AlignedSeries& aligned, const PolarityLexicon& lexicon,
                         const HistogramSpec& spec,
                         HistogramNorm norm = HistogramNorm::kInVocabulary);

// CSV `stock_id,date,r,c_next,x_1..x_L`, header included when requested.
void write_features_csv(std::ostream& out, const FeatureSequence& seq, bool header);

}  // namespace newsrnn
