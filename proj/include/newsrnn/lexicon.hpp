#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newsrnn/corpus.hpp"

namespace newsrnn {

inline constexpr double kDefaultSmoothing = 0.5;

// Document-level presence statistics over a token corpus. A token counts at
// most once per document. Vocabulary is restricted to tokens whose document
// frequency reaches min_df and is kept in ascending byte order.
class CorpusStats {
 public:
  CorpusStats() = default;

  // Throws DataError on an empty corpus or an empty filtered vocabulary.
  static CorpusStats build(const std::vector<std::vector<std::string>>& docs, std::size_t min_df);
  static CorpusStats build(const std::vector<Document>& docs, std::size_t min_df);

  std::size_t num_docs() const { return num_docs_; }
  std::size_t min_df() const { return min_df_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::size_t vocab_size() const { return vocab_.size(); }

  std::optional<std::size_t> id(std::string_view token) const;
  bool contains(std::string_view token) const { return id(token).has_value(); }

  // Both throw DataError for out-of-vocabulary tokens.
  std::size_t df(std::string_view token) const;
  std::size_t co_df(std::string_view w, std::string_view v) const;

  std::size_t df(std::size_t id) const { return postings_[id].size(); }
  std::size_t co_df(std::size_t w, std::size_t v) const;

  // Joint document counts of every vocab token against each anchor, laid out
  // row-major as [token][anchor]. Costs one pass over the documents instead of
  // materializing all token pairs.
  std::vector<std::uint32_t> co_df_against(const std::vector<std::size_t>& anchors) const;

 private:
  std::size_t require(std::string_view token) const;

  std::size_t num_docs_ = 0;
  std::size_t min_df_ = 1;
  std::vector<std::string> vocab_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::vector<std::uint32_t>> postings_;   // sorted doc ids per token
  std::vector<std::vector<std::uint32_t>> doc_terms_;  // sorted token ids per doc
};

// Smoothed PMI from raw counts: ln(N (co + eps) / (df_w df_v)).
double pmi_from_counts(std::size_t num_docs, std::size_t df_w, std::size_t df_v, double co,
                       double epsilon);

// Throws DataError if either token is outside the vocabulary and
// std::invalid_argument if epsilon is not positive.
double pmi(const CorpusStats& stats, std::string_view w, std::string_view v,
           double epsilon = kDefaultSmoothing);

struct SeedSets {
  std::vector<std::string> pos;
  std::vector<std::string> neg;
};

// Table of good-news / bad-news seed words shipped as the default.
SeedSets default_seed_sets();

// Seed file: a `POS:` section and a `NEG:` section, one token per line.
// Blank lines and lines starting with '#' are ignored.
SeedSets parse_seed_sets(std::istream& in);
SeedSets load_seed_sets(const std::filesystem::path& path);
void write_seed_sets(std::ostream& out, const SeedSets& seeds);

// Throws DataError unless both sets are non-empty, disjoint, duplicate-free and
// fully inside the vocabulary.
void validate_seeds(const CorpusStats& stats, const SeedSets& seeds);

// Mean PMI to the positive seeds minus mean PMI to the negative seeds.
double seed_polarity(const CorpusStats& stats, const SeedSets& seeds, std::string_view w,
                     double epsilon = kDefaultSmoothing);

// Seed polarity of every vocab token, indexed by vocab id.
std::vector<double> seed_polarities(const CorpusStats& stats, const SeedSets& seeds,
                                    double epsilon = kDefaultSmoothing);

struct StandardSets {
  std::vector<std::string> pos;  // highest seed polarity first
  std::vector<std::string> neg;  // lowest seed polarity last
};

// Picks the K tokens with the largest and the K tokens with the smallest seed
// polarity, which maximizes the mean-score gap between two disjoint K-sets.
// Ties sort by ascending token bytes. With exclude_seeds the seed tokens are
// not candidates. Throws DataError when fewer than 2K candidates exist.
StandardSets select_standard_sets(const CorpusStats& stats, const SeedSets& seeds, std::size_t k,
                                  double epsilon = kDefaultSmoothing, bool exclude_seeds = false);

struct LexiconParams {
  std::size_t k = 100;
  std::size_t min_df = 5;
  double epsilon = kDefaultSmoothing;
  bool exclude_seeds = false;
};

class PolarityLexicon {
 public:
  PolarityLexicon() = default;

  std::optional<double> polarity(std::string_view token) const;
  std::size_t size() const { return scores_.size(); }
  bool empty() const { return scores_.empty(); }

  // Token/score pairs in ascending token order.
  const std::map<std::string, double, std::less<>>& scores() const { return scores_; }

  const std::vector<std::string>& p_star() const { return p_star_; }
  const std::vector<std::string>& n_star() const { return n_star_; }
  const LexiconParams& params() const { return params_; }
  std::size_t num_docs() const { return num_docs_; }
  const SeedSets& seeds() const { return seeds_; }

  // TSV: `# K=.. epsilon=.. min_df=.. N=..` header then
  // token, polarity, in_p_star, in_n_star sorted by descending polarity.
  void write_tsv(std::ostream& out) const;
  static PolarityLexicon read_tsv(std::istream& in);
  static PolarityLexicon load_tsv(const std::filesystem::path& path);

  static PolarityLexicon from_scores(std::map<std::string, double, std::less<>> scores,
                                     std::vector<std::string> p_star,
                                     std::vector<std::string> n_star, LexiconParams params,
                                     std::size_t num_docs, SeedSets seeds);

 private:
  std::map<std::string, double, std::less<>> scores_;
  std::vector<std::string> p_star_;
  std::vector<std::string> n_star_;
  LexiconParams params_;
  std::size_t num_docs_ = 0;
  SeedSets seeds_;
};

// Polarity of every vocab token against the given standard sets.
std::vector<double> standard_polarities(const CorpusStats& stats, const StandardSets& sets,
                                        double epsilon);

PolarityLexicon build_lexicon(const CorpusStats& stats, const SeedSets& seeds,
                              const LexiconParams& params);
PolarityLexicon build_lexicon(const std::vector<Document>& docs, const SeedSets& seeds,
                              const LexiconParams& params);

}  // namespace newsrnn
