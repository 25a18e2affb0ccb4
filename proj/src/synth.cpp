#include "newsrnn/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "newsrnn/errors.hpp"
#include "newsrnn/random.hpp"

namespace newsrnn {

namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03zu", prefix, i);
  return buf;
}

std::vector<Date> trading_calendar(std::size_t count) {
  using namespace std::chrono;
  std::vector<Date> out;
  sys_days day = sys_days{year{2013} / January / 7};  // a Monday
  while (out.size() < count) {
    weekday wd{day};
    if (wd != Saturday && wd != Sunday) {
      year_month_day ymd{day};
      out.push_back(Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                         static_cast<unsigned>(ymd.day())});
    }
    day += days{1};
  }
  return out;
}

}  // namespace

SynthData synthesize(const SynthParams& p) {
  if (p.days < 3 || p.stocks == 0) throw std::invalid_argument("synth needs >= 3 days and >= 1 stock");
  if (!(p.signal >= 0.0 && p.signal <= 0.5)) throw std::invalid_argument("signal must lie in [0, 0.5]");
  if (!(p.news_rate >= 0.0 && p.news_rate <= 1.0)) throw std::invalid_argument("news_rate must lie in [0, 1]");
  if (p.impact_days == 0) throw std::invalid_argument("impact_days must be positive");
  if (p.cluster_size == 0 || p.seeds_per_cluster == 0 || p.seeds_per_cluster > p.cluster_size) {
    throw std::invalid_argument("need 1 <= seeds_per_cluster <= cluster_size");
  }
  if (!(p.cluster_share > 0.0 && p.cluster_share <= 1.0)) {
    throw std::invalid_argument("cluster_share must lie in (0, 1]");
  }
  if (p.cluster_share < 1.0 && p.neutral_size == 0) {
    throw std::invalid_argument("neutral filler needs neutral_size > 0");
  }
  if (p.min_tokens == 0 || p.max_tokens < p.min_tokens) throw std::invalid_argument("bad token counts");
  if (!(p.min_move > 0.0 && p.max_move >= p.min_move && p.max_move < 1.0)) {
    throw std::invalid_argument("need 0 < min_move <= max_move < 1");
  }

  SynthData data;
  for (std::size_t i = 0; i < p.cluster_size; ++i) {
    data.positive_tokens.push_back(numbered("good", i));
    data.negative_tokens.push_back(numbered("bad", i));
  }
  for (std::size_t i = 0; i < p.neutral_size; ++i) data.neutral_tokens.push_back(numbered("word", i));
  data.seeds.pos.assign(data.positive_tokens.begin(), data.positive_tokens.begin() + p.seeds_per_cluster);
  data.seeds.neg.assign(data.negative_tokens.begin(), data.negative_tokens.begin() + p.seeds_per_cluster);

  const auto calendar = trading_calendar(p.days);
  Rng rng(mix_seed(p.seed, 3));
  std::size_t doc_counter = 0;

  for (std::size_t s = 0; s < p.stocks; ++s) {
    PriceSeries series;
    series.stock_id = numbered("SYN", s + 1);
    // sentiment of the latest article and the day it appeared
    std::optional<std::pair<std::size_t, int>> latest;
    double close = uniform(rng, 10.0, 100.0);

    for (std::size_t t = 0; t < p.days; ++t) {
      if (t > 0) {
        double up_prob = 0.5;
        if (latest && t - latest->first <= p.impact_days) {
          up_prob = latest->second > 0 ? 0.5 + p.signal : 0.5 - p.signal;
        }
        const bool up = uniform01(rng) < up_prob;
        const double move = uniform(rng, p.min_move, p.max_move);
        const double prev = close;
        close = prev * (up ? 1.0 + move : 1.0 - move);
        const double open = prev * (1.0 + uniform(rng, -0.005, 0.005));
        const double high = std::max(open, close) * (1.0 + uniform(rng, 0.0, 0.01));
        series.bars.push_back(PriceBar{calendar[t], open, close, high,
                                       static_cast<std::int64_t>(uniform_index(rng, 1000000)) + 1000});
      } else {
        series.bars.push_back(PriceBar{calendar[t], close, close, close * 1.005, 100000});
      }

      if (uniform01(rng) < p.news_rate) {
        const int sentiment = uniform01(rng) < 0.5 ? 1 : -1;
        const auto& cluster = sentiment > 0 ? data.positive_tokens : data.negative_tokens;
        Document doc;
        doc.doc_id = "d" + std::to_string(++doc_counter);
        doc.date = calendar[t];
        doc.stock_id = series.stock_id;
        const std::size_t n =
            p.min_tokens + static_cast<std::size_t>(uniform_index(rng, p.max_tokens - p.min_tokens + 1));
        for (std::size_t k = 0; k < n; ++k) {
          if (uniform01(rng) < p.cluster_share) {
            doc.tokens.push_back(cluster[uniform_index(rng, cluster.size())]);
          } else {
            doc.tokens.push_back(data.neutral_tokens[uniform_index(rng, data.neutral_tokens.size())]);
          }
        }
        data.news.push_back(std::move(doc));
        latest = std::make_pair(t, sentiment);
      }
    }
    data.prices.push_back(std::move(series));
  }
  return data;
}

double bayes_accuracy(const SynthParams& p) {
  return 0.5 + p.signal * (1.0 - std::pow(1.0 - p.news_rate, static_cast<double>(p.impact_days)));
}

double same_day_news_accuracy(const SynthParams& p) { return 0.5 + p.signal * p.news_rate; }

void write_synth(const std::filesystem::path& dir, const SynthData& data) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "prices.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir / "prices.csv").string());
    write_prices(out, data.prices);
  }
  {
    std::ofstream out(dir / "news.jsonl", std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir / "news.jsonl").string());
    write_news(out, data.news);
  }
  {
    std::ofstream out(dir / "seeds.txt", std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir / "seeds.txt").string());
    write_seed_sets(out, data.seeds);
  }
}

}  // namespace newsrnn
