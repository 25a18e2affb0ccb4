#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "newsrnn/date.hpp"

namespace newsrnn {

struct PriceBar {
  Date date;
  double open = 0.0;
  double close = 0.0;
  double high = 0.0;
  std::int64_t volume = 0;
};

// Date-ordered bars of one stock. Loaders guarantee strictly increasing dates
// and at least two bars.
struct PriceSeries {
  std::string stock_id;
  std::vector<PriceBar> bars;

  std::vector<double> closes() const;
};

// One pre-tokenized news article tied to a stock and a calendar date.
struct Document {
  std::string doc_id;
  Date date;
  std::string stock_id;
  std::vector<std::string> tokens;
};

// All tokens attributed to one trading day, in file order. Empty on no-news days.
struct DailyNews {
  std::string stock_id;
  Date date;
  std::vector<std::string> tokens;
};

struct AlignedDay {
  Date date;
  double close = 0.0;
  DailyNews news;
};

struct AlignedSeries {
  std::string stock_id;
  std::vector<AlignedDay> days;
  // Documents dated after the last trading day; not attributed to any day.
  std::size_t dropped_documents = 0;
  std::size_t dropped_tokens = 0;
};

// Price CSV: header `stock_id,date,open,close,high,volume`. Returns one series
// per stock ordered by stock id. Throws DataError naming the offending line.
std::vector<PriceSeries> parse_prices(std::istream& in);
std::vector<PriceSeries> load_prices(const std::filesystem::path& path);
void write_prices(std::ostream& out, const std::vector<PriceSeries>& series);

// News JSONL: one object per line with string fields doc_id, date, stock_id,
// tokens (space separated). Blank lines are skipped.
std::vector<Document> parse_news(std::istream& in);
std::vector<Document> load_news(const std::filesystem::path& path);
void write_news(std::ostream& out, const std::vector<Document>& docs);

// Splits on single spaces; empty pieces (double spaces) are rejected.
std::vector<std::string> split_tokens(const std::string& text);

// Attributes every document of `prices.stock_id` to the first trading day on or
// after its date. Documents of other stocks are ignored; documents after the
// last trading day are counted as dropped.
AlignedSeries align(const PriceSeries& prices, const std::vector<Document>& docs);

}  // namespace newsrnn
