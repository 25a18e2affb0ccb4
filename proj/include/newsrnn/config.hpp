#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "newsrnn/baseline.hpp"
#include "newsrnn/features.hpp"
#include "newsrnn/lexicon.hpp"
#include "newsrnn/model.hpp"

namespace newsrnn {

struct ExperimentConfig {
  std::filesystem::path prices;
  std::filesystem::path news;
  std::filesystem::path seeds;  // empty: built-in default seed words
  std::filesystem::path out = "out";
  std::vector<std::string> stocks;  // empty: every stock in the price file
  std::uint64_t seed = 20160101;
  double split = 0.8;

  LexiconParams lexicon;
  std::size_t bins = 10;
  HistogramNorm norm = HistogramNorm::kInVocabulary;
  RnnDims dims;  // news_width is always `bins`
  TrainConfig train;  // seed is derived per stock from `seed`
  LinearHyperparams baseline;

  RnnDims model_dims() const {
    RnnDims d = dims;
    d.news_width = bins;
    return d;
  }
};

// Sets one field from its textual form. Throws ConfigError for an unknown key
// or an unparsable/out-of-range value.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const ExperimentConfig& config, std::string_view key);

// Every key accepted by set_config_value, in documentation order.
const std::vector<std::string_view>& config_keys();

// One-line description of a key, used for CLI help.
std::string_view config_key_help(std::string_view key);

// Flat `key = value` text; `#` starts a comment. Relative paths are resolved
// against `base_dir`. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ExperimentConfig& config);

// Throws ConfigError if a field is outside its valid range.
void validate(const ExperimentConfig& config);

}  // namespace newsrnn
