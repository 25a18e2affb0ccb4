#include "newsrnn/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>

#include "newsrnn/errors.hpp"

namespace newsrnn {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("config key '" + std::string(key) + "': " + std::string(why) + " (got '" +
                    std::string(value) + "')");
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size()) {
    bad_value(key, v, "expected a non-negative integer");
  }
  return out;
}

std::size_t to_positive(std::string_view key, std::string_view v) {
  auto n = to_u64(key, v);
  if (n == 0) bad_value(key, v, "must be positive");
  return static_cast<std::size_t>(n);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "expected a finite number");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "expected true or false");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  std::string_view help;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

using FieldTable = std::vector<std::pair<std::string_view, Field>>;

const FieldTable& fields() {
  static const FieldTable table = [] {
    FieldTable t;
    auto add = [&](std::string_view key, std::string_view help, auto set, auto get) {
      t.emplace_back(key, Field{help, set, get});
    };
    add("prices", "price CSV path",
        [](ExperimentConfig& c, std::string_view v) { c.prices = std::string(v); },
        [](const ExperimentConfig& c) { return c.prices.generic_string(); });
    add("news", "news JSONL path",
        [](ExperimentConfig& c, std::string_view v) { c.news = std::string(v); },
        [](const ExperimentConfig& c) { return c.news.generic_string(); });
    add("seeds", "seed word file (empty: built-in table)",
        [](ExperimentConfig& c, std::string_view v) { c.seeds = std::string(v); },
        [](const ExperimentConfig& c) { return c.seeds.generic_string(); });
    add("out", "output directory",
        [](ExperimentConfig& c, std::string_view v) { c.out = std::string(v); },
        [](const ExperimentConfig& c) { return c.out.generic_string(); });
    add("stocks", "comma-separated stock ids (empty: all)",
        [](ExperimentConfig& c, std::string_view v) {
          c.stocks.clear();
          std::size_t start = 0;
          while (start <= v.size()) {
            auto pos = v.find(',', start);
            auto piece = trim(v.substr(start, pos == std::string_view::npos ? v.npos : pos - start));
            if (!piece.empty()) c.stocks.push_back(piece);
            if (pos == std::string_view::npos) break;
            start = pos + 1;
          }
        },
        [](const ExperimentConfig& c) {
          std::string s;
          for (const auto& id : c.stocks) s += (s.empty() ? "" : ",") + id;
          return s;
        });
    add("seed", "global random seed",
        [](ExperimentConfig& c, std::string_view v) { c.seed = to_u64("seed", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.seed); });
    add("split", "fraction of trading days used for training, in (0,1)",
        [](ExperimentConfig& c, std::string_view v) {
          c.split = to_double("split", v);
          if (!(c.split > 0.0 && c.split < 1.0)) bad_value("split", v, "must lie in (0,1)");
        },
        [](const ExperimentConfig& c) { return fmt(c.split); });
    add("lexicon.k", "size K of each standard word set",
        [](ExperimentConfig& c, std::string_view v) { c.lexicon.k = to_positive("lexicon.k", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.lexicon.k); });
    add("lexicon.min_df", "minimum document frequency for the vocabulary",
        [](ExperimentConfig& c, std::string_view v) {
          c.lexicon.min_df = to_positive("lexicon.min_df", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.lexicon.min_df); });
    add("lexicon.epsilon", "additive smoothing of joint document counts",
        [](ExperimentConfig& c, std::string_view v) {
          c.lexicon.epsilon = to_double("lexicon.epsilon", v);
          if (!(c.lexicon.epsilon > 0.0)) bad_value("lexicon.epsilon", v, "must be positive");
        },
        [](const ExperimentConfig& c) { return fmt(c.lexicon.epsilon); });
    add("lexicon.exclude_seeds", "keep seed words out of the standard sets",
        [](ExperimentConfig& c, std::string_view v) {
          c.lexicon.exclude_seeds = to_bool("lexicon.exclude_seeds", v);
        },
        [](const ExperimentConfig& c) { return std::string(c.lexicon.exclude_seeds ? "true" : "false"); });
    add("features.bins", "histogram bin count L",
        [](ExperimentConfig& c, std::string_view v) { c.bins = to_positive("features.bins", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.bins); });
    add("features.norm", "histogram denominator: in_vocab or all_tokens",
        [](ExperimentConfig& c, std::string_view v) {
          if (v == "in_vocab") {
            c.norm = HistogramNorm::kInVocabulary;
          } else if (v == "all_tokens") {
            c.norm = HistogramNorm::kAllTokens;
          } else {
            bad_value("features.norm", v, "expected in_vocab or all_tokens");
          }
        },
        [](const ExperimentConfig& c) {
          return std::string(c.norm == HistogramNorm::kInVocabulary ? "in_vocab" : "all_tokens");
        });
    add("rnn.price_hidden", "price branch width",
        [](ExperimentConfig& c, std::string_view v) { c.dims.price_hidden = to_positive("rnn.price_hidden", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.dims.price_hidden); });
    add("rnn.news_hidden", "recurrent news branch width",
        [](ExperimentConfig& c, std::string_view v) { c.dims.news_hidden = to_positive("rnn.news_hidden", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.dims.news_hidden); });
    add("rnn.fusion_hidden", "fusion layer width",
        [](ExperimentConfig& c, std::string_view v) { c.dims.fusion_hidden = to_positive("rnn.fusion_hidden", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.dims.fusion_hidden); });
    add("train.learning_rate", "SGD step size",
        [](ExperimentConfig& c, std::string_view v) {
          c.train.learning_rate = to_double("train.learning_rate", v);
          if (!(c.train.learning_rate > 0.0)) bad_value("train.learning_rate", v, "must be positive");
        },
        [](const ExperimentConfig& c) { return fmt(c.train.learning_rate); });
    add("train.lr_decay", "per-epoch learning rate multiplier",
        [](ExperimentConfig& c, std::string_view v) {
          c.train.lr_decay = to_double("train.lr_decay", v);
          if (!(c.train.lr_decay > 0.0)) bad_value("train.lr_decay", v, "must be positive");
        },
        [](const ExperimentConfig& c) { return fmt(c.train.lr_decay); });
    add("train.l2", "L2 weight on the network weights",
        [](ExperimentConfig& c, std::string_view v) {
          c.train.l2 = to_double("train.l2", v);
          if (c.train.l2 < 0.0) bad_value("train.l2", v, "must be non-negative");
        },
        [](const ExperimentConfig& c) { return fmt(c.train.l2); });
    add("train.regularize_biases", "include bias vectors in the L2 term",
        [](ExperimentConfig& c, std::string_view v) {
          c.train.regularize_biases = to_bool("train.regularize_biases", v);
        },
        [](const ExperimentConfig& c) { return std::string(c.train.regularize_biases ? "true" : "false"); });
    add("train.epochs", "training epochs",
        [](ExperimentConfig& c, std::string_view v) { c.train.epochs = to_u64("train.epochs", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.train.epochs); });
    add("train.clip_norm", "global gradient norm clip, or none",
        [](ExperimentConfig& c, std::string_view v) {
          if (v == "none") {
            c.train.clip_norm.reset();
            return;
          }
          double x = to_double("train.clip_norm", v);
          if (!(x > 0.0)) bad_value("train.clip_norm", v, "must be positive or none");
          c.train.clip_norm = x;
        },
        [](const ExperimentConfig& c) {
          return c.train.clip_norm ? fmt(*c.train.clip_norm) : std::string("none");
        });
    add("train.truncation", "steps per truncated-BPTT window, or none",
        [](ExperimentConfig& c, std::string_view v) {
          if (v == "none") {
            c.train.truncation.reset();
            return;
          }
          c.train.truncation = to_positive("train.truncation", v);
        },
        [](const ExperimentConfig& c) {
          return c.train.truncation ? std::to_string(*c.train.truncation) : std::string("none");
        });
    add("baseline.l2", "linear baseline L2 weight",
        [](ExperimentConfig& c, std::string_view v) {
          c.baseline.l2 = to_double("baseline.l2", v);
          if (!(c.baseline.l2 > 0.0)) bad_value("baseline.l2", v, "must be positive");
        },
        [](const ExperimentConfig& c) { return fmt(c.baseline.l2); });
    add("baseline.learning_rate", "linear baseline initial step size",
        [](ExperimentConfig& c, std::string_view v) {
          c.baseline.learning_rate = to_double("baseline.learning_rate", v);
          if (!(c.baseline.learning_rate > 0.0)) bad_value("baseline.learning_rate", v, "must be positive");
        },
        [](const ExperimentConfig& c) { return fmt(c.baseline.learning_rate); });
    add("baseline.epochs", "linear baseline epochs",
        [](ExperimentConfig& c, std::string_view v) { c.baseline.epochs = to_u64("baseline.epochs", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.baseline.epochs); });
    return t;
  }();
  return table;
}

const Field& field(std::string_view key) {
  for (const auto& [k, f] : fields()) {
    if (k == key) return f;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

bool is_path_key(std::string_view key) {
  return key == "prices" || key == "news" || key == "seeds" || key == "out";
}

}  // namespace

void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
  field(key).set(config, value);
}

std::string get_config_value(const ExperimentConfig& config, std::string_view key) {
  return field(key).get(config);
}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> k;
    for (const auto& [key, f] : fields()) k.push_back(key);
    return k;
  }();
  return keys;
}

std::string_view config_key_help(std::string_view key) { return field(key).help; }

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto text = trim(line);
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim(std::string_view(text).substr(0, eq));
    auto value = trim(std::string_view(text).substr(eq + 1));
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
      throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                        "' already set on line " + std::to_string(it->second));
    }
    try {
      set_config_value(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
    if (is_path_key(key) && !value.empty() && !base_dir.empty()) {
      std::filesystem::path p(value);
      if (p.is_relative()) set_config_value(config, key, (base_dir / p).lexically_normal().string());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

void write_config(std::ostream& out, const ExperimentConfig& config) {
  for (const auto& [key, f] : fields()) out << key << " = " << f.get(config) << '\n';
}

void validate(const ExperimentConfig& config) {
  if (!(config.split > 0.0 && config.split < 1.0)) throw ConfigError("split must lie in (0,1)");
  if (config.bins == 0) throw ConfigError("features.bins must be positive");
  if (!config.dims.valid()) throw ConfigError("RNN widths must be positive");
  if (config.lexicon.k == 0 || config.lexicon.min_df == 0) {
    throw ConfigError("lexicon.k and lexicon.min_df must be positive");
  }
  if (!(config.lexicon.epsilon > 0.0)) throw ConfigError("lexicon.epsilon must be positive");
}

}  // namespace newsrnn
