#include "newsrnn/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "newsrnn/errors.hpp"

namespace newsrnn {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

double parse_price(std::string_view field, std::size_t line_no, const char* name) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    fail_line(line_no, std::string("non-numeric ") + name + " '" + std::string(field) + "'");
  }
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail_line(line_no, std::string(name) + " must be a positive finite number");
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string chomp(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<double> PriceSeries::closes() const {
  std::vector<double> out;
  out.reserve(bars.size());
  for (const auto& bar : bars) out.push_back(bar.close);
  return out;
}

std::vector<PriceSeries> parse_prices(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("price file is empty");
  ++line_no;
  line = chomp(line);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != "stock_id,date,open,close,high,volume") {
    fail_line(line_no, "expected header 'stock_id,date,open,close,high,volume'");
  }

  std::map<std::string, std::vector<std::pair<std::size_t, PriceBar>>> grouped;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != 6) {
      fail_line(line_no, "expected 6 columns, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) fail_line(line_no, "empty stock_id");
    PriceBar bar;
    auto date = parse_date(fields[1]);
    if (!date) fail_line(line_no, "bad date '" + std::string(fields[1]) + "'");
    bar.date = *date;
    bar.open = parse_price(fields[2], line_no, "open");
    bar.close = parse_price(fields[3], line_no, "close");
    bar.high = parse_price(fields[4], line_no, "high");
    {
      auto f = fields[5];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), bar.volume);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || bar.volume < 0) {
        fail_line(line_no, "volume must be a non-negative integer");
      }
    }
    if (bar.high < std::max(bar.open, bar.close)) {
      fail_line(line_no, "high is below open or close");
    }
    grouped[std::string(fields[0])].emplace_back(line_no, bar);
  }

  std::vector<PriceSeries> out;
  for (auto& [stock, rows] : grouped) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second.date < b.second.date; });
    PriceSeries series{stock, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].second.date == rows[i - 1].second.date) {
        fail_line(rows[i].first, "duplicate date " + to_string(rows[i].second.date) +
                                     " for stock " + stock);
      }
      series.bars.push_back(rows[i].second);
    }
    if (series.bars.size() < 2) {
      throw DataError("stock " + stock + " has fewer than 2 price bars");
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<PriceSeries> load_prices(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open price file " + path.string());
  try {
    return parse_prices(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_prices(std::ostream& out, const std::vector<PriceSeries>& series) {
  out << "stock_id,date,open,close,high,volume\n";
  for (const auto& s : series) {
    for (const auto& bar : s.bars) {
      out << s.stock_id << ',' << to_string(bar.date) << ',' << format_double(bar.open) << ','
          << format_double(bar.close) << ',' << format_double(bar.high) << ',' << bar.volume
          << '\n';
    }
  }
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  if (text.empty()) return tokens;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(' ', start);
    auto piece = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (piece.empty()) throw DataError("empty token (consecutive or edge spaces)");
    if (piece.find_first_of("\t\n\r\v\f") != std::string::npos) {
      throw DataError("token contains whitespace");
    }
    tokens.push_back(std::move(piece));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return tokens;
}

std::vector<Document> parse_news(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail_line(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) fail_line(line_no, "expected a JSON object");
    auto field = [&](const char* name) -> std::string {
      auto it = obj.find(name);
      if (it == obj.end()) fail_line(line_no, std::string("missing field '") + name + "'");
      if (!it->is_string()) fail_line(line_no, std::string("field '") + name + "' is not a string");
      return it->get<std::string>();
    };
    Document doc;
    doc.doc_id = field("doc_id");
    auto date_text = field("date");
    auto date = parse_date(date_text);
    if (!date) fail_line(line_no, "bad date '" + date_text + "'");
    doc.date = *date;
    doc.stock_id = field("stock_id");
    if (doc.stock_id.empty()) fail_line(line_no, "empty stock_id");
    try {
      doc.tokens = split_tokens(field("tokens"));
    } catch (const DataError& e) {
      fail_line(line_no, e.what());
    }
    if (doc.tokens.empty()) fail_line(line_no, "empty token list");
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_news(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open news file " + path.string());
  try {
    return parse_news(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_news(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& doc : docs) {
    std::string joined;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i) joined += ' ';
      joined += doc.tokens[i];
    }
    nlohmann::ordered_json obj;
    obj["doc_id"] = doc.doc_id;
    obj["date"] = to_string(doc.date);
    obj["stock_id"] = doc.stock_id;
    obj["tokens"] = joined;
    out << obj.dump(-1, ' ', false) << '\n';
  }
}

AlignedSeries align(const PriceSeries& prices, const std::vector<Document>& docs) {
  AlignedSeries aligned;
  aligned.stock_id = prices.stock_id;
  aligned.days.reserve(prices.bars.size());
  for (const auto& bar : prices.bars) {
    aligned.days.push_back(AlignedDay{bar.date, bar.close, DailyNews{prices.stock_id, bar.date, {}}});
  }
  for (const auto& doc : docs) {
    if (doc.stock_id != prices.stock_id) continue;
    auto it = std::lower_bound(aligned.days.begin(), aligned.days.end(), doc.date,
                               [](const AlignedDay& day, const Date& d) { return day.date < d; });
    if (it == aligned.days.end()) {
      ++aligned.dropped_documents;
      aligned.dropped_tokens += doc.tokens.size();
      continue;
    }
    auto& tokens = it->news.tokens;
    tokens.insert(tokens.end(), doc.tokens.begin(), doc.tokens.end());
  }
  return aligned;
}

}  // namespace newsrnn
