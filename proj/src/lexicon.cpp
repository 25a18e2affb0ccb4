#include "newsrnn/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "newsrnn/errors.hpp"

namespace newsrnn {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("PMI smoothing epsilon must be positive and finite");
  }
}

double mean_pmi(const CorpusStats& stats, std::size_t w, const std::vector<std::uint32_t>& co,
                std::size_t row_stride, std::size_t first, const std::vector<std::size_t>& anchors,
                std::size_t count, double epsilon) {
  double sum = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t a = anchors[first + j];
    sum += pmi_from_counts(stats.num_docs(), stats.df(w), stats.df(a),
                           static_cast<double>(co[w * row_stride + first + j]), epsilon);
  }
  return sum / static_cast<double>(count);
}

// Scores every vocab token as mean PMI to `pos` minus mean PMI to `neg`.
std::vector<double> contrast_scores(const CorpusStats& stats, const std::vector<std::size_t>& pos,
                                    const std::vector<std::size_t>& neg, double epsilon) {
  check_epsilon(epsilon);
  std::vector<std::size_t> anchors(pos);
  anchors.insert(anchors.end(), neg.begin(), neg.end());
  const auto co = stats.co_df_against(anchors);
  const std::size_t stride = anchors.size();
  std::vector<double> scores(stats.vocab_size());
  for (std::size_t w = 0; w < stats.vocab_size(); ++w) {
    scores[w] = mean_pmi(stats, w, co, stride, 0, anchors, pos.size(), epsilon) -
                mean_pmi(stats, w, co, stride, pos.size(), anchors, neg.size(), epsilon);
  }
  return scores;
}

std::vector<std::size_t> ids_of(const CorpusStats& stats, const std::vector<std::string>& tokens) {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto id = stats.id(t);
    if (!id) throw DataError("token '" + t + "' is not in the vocabulary");
    ids.push_back(*id);
  }
  return ids;
}

}  // namespace

CorpusStats CorpusStats::build(const std::vector<std::vector<std::string>>& docs,
                               std::size_t min_df) {
  if (docs.empty()) throw DataError("cannot build corpus statistics from an empty corpus");
  if (min_df < 1) throw std::invalid_argument("min_df must be at least 1");

  std::map<std::string, std::size_t, std::less<>> counts;
  std::vector<std::vector<std::string>> unique_docs;
  unique_docs.reserve(docs.size());
  for (const auto& doc : docs) {
    std::vector<std::string> u(doc);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    for (const auto& t : u) ++counts[t];
    unique_docs.push_back(std::move(u));
  }

  CorpusStats stats;
  stats.num_docs_ = docs.size();
  stats.min_df_ = min_df;
  for (const auto& [token, count] : counts) {
    if (count >= min_df) {
      stats.index_.emplace(token, stats.vocab_.size());
      stats.vocab_.push_back(token);
    }
  }
  if (stats.vocab_.empty()) {
    throw DataError("vocabulary is empty after filtering with min_df=" + std::to_string(min_df));
  }

  stats.postings_.resize(stats.vocab_.size());
  stats.doc_terms_.resize(docs.size());
  for (std::size_t d = 0; d < unique_docs.size(); ++d) {
    for (const auto& t : unique_docs[d]) {
      auto it = stats.index_.find(t);
      if (it == stats.index_.end()) continue;
      stats.postings_[it->second].push_back(static_cast<std::uint32_t>(d));
      stats.doc_terms_[d].push_back(static_cast<std::uint32_t>(it->second));
    }
  }
  return stats;
}

CorpusStats CorpusStats::build(const std::vector<Document>& docs, std::size_t min_df) {
  std::vector<std::vector<std::string>> token_docs;
  token_docs.reserve(docs.size());
  for (const auto& d : docs) token_docs.push_back(d.tokens);
  return build(token_docs, min_df);
}

std::optional<std::size_t> CorpusStats::id(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t CorpusStats::require(std::string_view token) const {
  auto id = this->id(token);
  if (!id) throw DataError("token '" + std::string(token) + "' is not in the vocabulary");
  return *id;
}

std::size_t CorpusStats::df(std::string_view token) const { return df(require(token)); }

std::size_t CorpusStats::co_df(std::string_view w, std::string_view v) const {
  return co_df(require(w), require(v));
}

std::size_t CorpusStats::co_df(std::size_t w, std::size_t v) const {
  const auto& a = postings_[w];
  const auto& b = postings_[v];
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::vector<std::uint32_t> CorpusStats::co_df_against(const std::vector<std::size_t>& anchors) const {
  const std::size_t width = anchors.size();
  std::vector<std::uint32_t> out(vocab_.size() * width, 0);
  // token id -> anchor columns (an anchor may be listed more than once)
  std::unordered_map<std::size_t, std::vector<std::size_t>> columns;
  for (std::size_t j = 0; j < width; ++j) columns[anchors[j]].push_back(j);

  std::vector<std::size_t> present;
  for (const auto& terms : doc_terms_) {
    present.clear();
    for (auto t : terms) {
      auto it = columns.find(t);
      if (it != columns.end()) present.insert(present.end(), it->second.begin(), it->second.end());
    }
    if (present.empty()) continue;
    for (auto t : terms) {
      auto* row = out.data() + static_cast<std::size_t>(t) * width;
      for (auto j : present) ++row[j];
    }
  }
  return out;
}

double pmi_from_counts(std::size_t num_docs, std::size_t df_w, std::size_t df_v, double co,
                       double epsilon) {
  return std::log(static_cast<double>(num_docs) * (co + epsilon) /
                  (static_cast<double>(df_w) * static_cast<double>(df_v)));
}

double pmi(const CorpusStats& stats, std::string_view w, std::string_view v, double epsilon) {
  check_epsilon(epsilon);
  const std::size_t co = stats.co_df(w, v);
  return pmi_from_counts(stats.num_docs(), stats.df(w), stats.df(v), static_cast<double>(co),
                         epsilon);
}

SeedSets default_seed_sets() {
  return SeedSets{
      {"受益", "提升", "改善", "稳健", "看好", "有望", "增", "收购", "利好", "优势"},
      {"下滑", "低于", "下降", "拖累", "跌", "降", "亏损", "违规", "处罚", "利空"},
  };
}

SeedSets parse_seed_sets(std::istream& in) {
  SeedSets seeds;
  std::vector<std::string>* section = nullptr;
  std::string line;
  std::size_t line_no = 0;
  bool saw_pos = false, saw_neg = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == "POS:") {
      section = &seeds.pos;
      saw_pos = true;
    } else if (t == "NEG:") {
      section = &seeds.neg;
      saw_neg = true;
    } else if (!section) {
      throw DataError("seed file line " + std::to_string(line_no) +
                      ": token before any POS:/NEG: section");
    } else if (t.find_first_of(" \t") != std::string::npos) {
      throw DataError("seed file line " + std::to_string(line_no) + ": token contains whitespace");
    } else {
      section->push_back(t);
    }
  }
  if (!saw_pos || !saw_neg) throw DataError("seed file needs both POS: and NEG: sections");
  return seeds;
}

SeedSets load_seed_sets(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open seed file " + path.string());
  return parse_seed_sets(in);
}

void write_seed_sets(std::ostream& out, const SeedSets& seeds) {
  out << "POS:\n";
  for (const auto& t : seeds.pos) out << t << '\n';
  out << "NEG:\n";
  for (const auto& t : seeds.neg) out << t << '\n';
}

void validate_seeds(const CorpusStats& stats, const SeedSets& seeds) {
  if (seeds.pos.empty() || seeds.neg.empty()) {
    throw DataError("positive and negative seed sets must both be non-empty");
  }
  std::set<std::string> pos(seeds.pos.begin(), seeds.pos.end());
  std::set<std::string> neg(seeds.neg.begin(), seeds.neg.end());
  if (pos.size() != seeds.pos.size() || neg.size() != seeds.neg.size()) {
    throw DataError("seed sets contain duplicate tokens");
  }
  for (const auto& t : pos) {
    if (neg.count(t)) throw DataError("seed '" + t + "' is in both the positive and negative set");
  }
  std::vector<std::string> missing;
  for (const auto* set : {&seeds.pos, &seeds.neg}) {
    for (const auto& t : *set) {
      if (!stats.contains(t)) missing.push_back(t);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& t : missing) list += (list.empty() ? "" : ", ") + t;
    throw DataError("seed tokens missing from the vocabulary (min_df=" +
                    std::to_string(stats.min_df()) + "): " + list);
  }
}

double seed_polarity(const CorpusStats& stats, const SeedSets& seeds, std::string_view w,
                     double epsilon) {
  check_epsilon(epsilon);
  validate_seeds(stats, seeds);
  auto mean = [&](const std::vector<std::string>& set) {
    double sum = 0.0;
    for (const auto& v : set) sum += pmi(stats, w, v, epsilon);
    return sum / static_cast<double>(set.size());
  };
  return mean(seeds.pos) - mean(seeds.neg);
}

std::vector<double> seed_polarities(const CorpusStats& stats, const SeedSets& seeds,
                                    double epsilon) {
  validate_seeds(stats, seeds);
  return contrast_scores(stats, ids_of(stats, seeds.pos), ids_of(stats, seeds.neg), epsilon);
}

StandardSets select_standard_sets(const CorpusStats& stats, const SeedSets& seeds, std::size_t k,
                                  double epsilon, bool exclude_seeds) {
  if (k == 0) throw std::invalid_argument("standard set size K must be positive");
  const auto scores = seed_polarities(stats, seeds, epsilon);

  std::vector<std::size_t> order;
  order.reserve(stats.vocab_size());
  std::set<std::string_view> seed_tokens;
  if (exclude_seeds) {
    seed_tokens.insert(seeds.pos.begin(), seeds.pos.end());
    seed_tokens.insert(seeds.neg.begin(), seeds.neg.end());
  }
  for (std::size_t i = 0; i < stats.vocab_size(); ++i) {
    if (!seed_tokens.count(stats.vocab()[i])) order.push_back(i);
  }
  if (2 * k > order.size()) {
    throw DataError("need at least 2K=" + std::to_string(2 * k) + " candidate tokens, have " +
                    std::to_string(order.size()));
  }
  // Vocab ids ascend with token bytes, so comparing ids breaks ties by bytes.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  StandardSets sets;
  for (std::size_t i = 0; i < k; ++i) sets.pos.push_back(stats.vocab()[order[i]]);
  for (std::size_t i = order.size() - k; i < order.size(); ++i) {
    sets.neg.push_back(stats.vocab()[order[i]]);
  }
  return sets;
}

std::vector<double> standard_polarities(const CorpusStats& stats, const StandardSets& sets,
                                        double epsilon) {
  if (sets.pos.empty() || sets.neg.empty()) {
    throw std::invalid_argument("standard sets must be non-empty");
  }
  return contrast_scores(stats, ids_of(stats, sets.pos), ids_of(stats, sets.neg), epsilon);
}

PolarityLexicon build_lexicon(const CorpusStats& stats, const SeedSets& seeds,
                              const LexiconParams& params) {
  auto sets = select_standard_sets(stats, seeds, params.k, params.epsilon, params.exclude_seeds);
  auto scores = standard_polarities(stats, sets, params.epsilon);
  std::map<std::string, double, std::less<>> table;
  for (std::size_t i = 0; i < stats.vocab_size(); ++i) table.emplace(stats.vocab()[i], scores[i]);
  return PolarityLexicon::from_scores(std::move(table), std::move(sets.pos), std::move(sets.neg),
                                      params, stats.num_docs(), seeds);
}

PolarityLexicon build_lexicon(const std::vector<Document>& docs, const SeedSets& seeds,
                              const LexiconParams& params) {
  return build_lexicon(CorpusStats::build(docs, params.min_df), seeds, params);
}

PolarityLexicon PolarityLexicon::from_scores(std::map<std::string, double, std::less<>> scores,
                                             std::vector<std::string> p_star,
                                             std::vector<std::string> n_star, LexiconParams params,
                                             std::size_t num_docs, SeedSets seeds) {
  PolarityLexicon lex;
  lex.scores_ = std::move(scores);
  lex.p_star_ = std::move(p_star);
  lex.n_star_ = std::move(n_star);
  lex.params_ = params;
  lex.num_docs_ = num_docs;
  lex.seeds_ = std::move(seeds);
  return lex;
}

std::optional<double> PolarityLexicon::polarity(std::string_view token) const {
  auto it = scores_.find(token);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

void PolarityLexicon::write_tsv(std::ostream& out) const {
  out << "# K=" << params_.k << " epsilon=" << format_double(params_.epsilon)
      << " min_df=" << params_.min_df << " N=" << num_docs_ << '\n';
  std::vector<std::pair<std::string_view, double>> rows(scores_.begin(), scores_.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::set<std::string_view> pos(p_star_.begin(), p_star_.end());
  std::set<std::string_view> neg(n_star_.begin(), n_star_.end());
  for (const auto& [token, score] : rows) {
    out << token << '\t' << format_double(score) << '\t' << (pos.count(token) ? 1 : 0) << '\t'
        << (neg.count(token) ? 1 : 0) << '\n';
  }
}

PolarityLexicon PolarityLexicon::read_tsv(std::istream& in) {
  PolarityLexicon lex;
  std::string line;
  if (!std::getline(in, line)) throw DataError("lexicon file is empty");
  {
    std::istringstream header(line);
    std::string hash, k, eps, min_df, n;
    header >> hash >> k >> eps >> min_df >> n;
    auto value = [&](const std::string& field, const char* key) {
      const std::string prefix = std::string(key) + "=";
      if (field.rfind(prefix, 0) != 0) throw DataError("lexicon header missing " + prefix);
      return field.substr(prefix.size());
    };
    if (hash != "#") throw DataError("lexicon header must start with '#'");
    try {
      lex.params_.k = std::stoul(value(k, "K"));
      lex.params_.epsilon = std::stod(value(eps, "epsilon"));
      lex.params_.min_df = std::stoul(value(min_df, "min_df"));
      lex.num_docs_ = std::stoul(value(n, "N"));
    } catch (const std::logic_error&) {
      throw DataError("malformed lexicon header: " + line);
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto pos = line.find('\t', start);
      fields.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (fields.size() != 4) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": expected 4 columns");
    }
    double score = 0.0;
    try {
      std::size_t used = 0;
      score = std::stod(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": bad polarity");
    }
    if (!lex.scores_.emplace(fields[0], score).second) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": duplicate token");
    }
    if (fields[2] == "1") lex.p_star_.push_back(fields[0]);
    if (fields[3] == "1") lex.n_star_.push_back(fields[0]);
  }
  if (lex.scores_.empty()) throw DataError("lexicon has no entries");
  return lex;
}

PolarityLexicon PolarityLexicon::load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open lexicon file " + path.string());
  return read_tsv(in);
}

}  // namespace newsrnn
