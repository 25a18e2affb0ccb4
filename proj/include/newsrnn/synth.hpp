#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "newsrnn/corpus.hpp"
#include "newsrnn/lexicon.hpp"

namespace newsrnn {

// Planted-signal market generator.
//
// Vocabulary: `cluster_size` positive tokens, `cluster_size` negative tokens
// and `neutral_size` neutral tokens. On each trading day a stock gets one news
// article with probability `news_rate`; the article is good or bad news with
// equal odds and mixes tokens of its cluster (share `cluster_share`) with
// neutral filler. News published on day s governs the direction of days
// s+1 .. s+impact_days (the newest article wins): the close moves in the
// article's direction with probability 0.5 + signal and against it otherwise.
// Days not governed by news move up or down with equal odds. Return sizes are
// uniform in [min_move, max_move], so closes never repeat.
//
// The first `seeds_per_cluster` tokens of each cluster form the seed file.
struct SynthParams {
  std::size_t days = 600;
  std::size_t stocks = 20;
  double signal = 0.4;
  double news_rate = 0.5;
  std::size_t impact_days = 1;
  std::size_t cluster_size = 20;
  std::size_t neutral_size = 60;
  double cluster_share = 0.5;
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 16;
  std::size_t seeds_per_cluster = 2;
  double min_move = 0.002;
  double max_move = 0.03;
  std::uint64_t seed = 1;
};

struct SynthData {
  std::vector<PriceSeries> prices;
  std::vector<Document> news;
  SeedSets seeds;
  std::vector<std::string> positive_tokens;
  std::vector<std::string> negative_tokens;
  std::vector<std::string> neutral_tokens;
};

// Throws std::invalid_argument for out-of-range parameters.
SynthData synthesize(const SynthParams& params);

// Accuracy of the best predictor that knows every past article:
// 0.5 + signal * (1 - (1 - news_rate)^impact_days).
double bayes_accuracy(const SynthParams& params);

// Accuracy of the best predictor that only sees the current day's article:
// 0.5 + signal * news_rate.
double same_day_news_accuracy(const SynthParams& params);

// Writes prices.csv, news.jsonl and seeds.txt into `dir` (created if needed).
void write_synth(const std::filesystem::path& dir, const SynthData& data);

}  // namespace newsrnn
