#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "newsrnn/corpus.hpp"
#include "newsrnn/errors.hpp"

using namespace newsrnn;

namespace {

Date d(const char* s) { return *parse_date(s); }

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& needle) {
  return s.find(needle) != std::string::npos;
}

PriceSeries make_series(const std::string& id, std::vector<std::pair<const char*, double>> rows) {
  PriceSeries s{id, {}};
  for (auto [date, close] : rows) s.bars.push_back({d(date), close, close, close, 1});
  return s;
}

Document doc(const char* id, const char* date, const char* stock, std::vector<std::string> tokens) {
  return Document{id, d(date), stock, std::move(tokens)};
}

}  // namespace

TEST_CASE("dates parse strictly") {
  CHECK(parse_date("2015-08-31") == Date{2015, 8, 31});
  CHECK_FALSE(parse_date("2015-02-30"));
  CHECK_FALSE(parse_date("2015-8-31"));
  CHECK_FALSE(parse_date("2015/08/31"));
  CHECK(to_string(Date{2013, 1, 7}) == "2013-01-07");
  CHECK(Date{2013, 1, 7} < Date{2013, 2, 1});
}

TEST_CASE("minimal price file") {
  std::istringstream in("stock_id,date,open,close,high,volume\n"
                        "600030,2015-01-05,99,100,101,10\n"
                        "600030,2015-01-06,100,110,111,12\n");
  auto series = parse_prices(in);
  REQUIRE(series.size() == 1);
  CHECK(series[0].stock_id == "600030");
  CHECK(series[0].closes() == std::vector<double>{100, 110});
  CHECK(series[0].bars[1].volume == 12);
}

TEST_CASE("duplicate stock/date is rejected") {
  std::istringstream in("stock_id,date,open,close,high,volume\n"
                        "A,2015-01-05,1,1,1,1\n"
                        "A,2015-01-06,1,1,1,1\n"
                        "A,2015-01-05,2,2,2,1\n");
  auto msg = error_of([&] { parse_prices(in); });
  CHECK(contains(msg, "duplicate date"));
  CHECK(contains(msg, "line 4"));
}

TEST_CASE("interleaved stocks are grouped and date-sorted") {
  const char* dates[] = {"2015-01-05", "2015-01-06", "2015-01-07", "2015-01-08", "2015-01-09"};
  const char* stocks[] = {"B", "A", "C"};
  std::vector<std::string> rows;
  for (int di = 0; di < 5; ++di) {
    for (int si = 0; si < 3; ++si) {
      rows.push_back(std::string(stocks[si]) + "," + dates[di] + ",1," +
                     std::to_string(10 * (si + 1) + di) + ",100,5");
    }
  }
  std::mt19937 gen(7);
  std::shuffle(rows.begin(), rows.end(), gen);
  std::string text = "stock_id,date,open,close,high,volume\n";
  for (const auto& r : rows) text += r + "\n";
  std::istringstream in(text);
  auto series = parse_prices(in);

  // Hand-sorted expectation: stocks by id, closes ascend with date by construction.
  REQUIRE(series.size() == 3);
  const std::vector<std::pair<std::string, int>> expected = {{"A", 20}, {"B", 10}, {"C", 30}};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(series[i].stock_id == expected[i].first);
    REQUIRE(series[i].bars.size() == 5);
    for (int di = 0; di < 5; ++di) {
      CHECK(series[i].bars[di].date == d(dates[di]));
      CHECK(series[i].bars[di].close == expected[i].second + di);
    }
  }
}

TEST_CASE("malformed price rows name their line") {
  const std::string header = "stock_id,date,open,close,high,volume\n";
  auto fails = [&](const std::string& body, const std::string& what) {
    std::istringstream in(header + "A,2015-01-05,1,1,1,1\n" + body);
    auto msg = error_of([&] { parse_prices(in); });
    CHECK_MESSAGE(contains(msg, "line 3"), msg);
    CHECK_MESSAGE(contains(msg, what), msg);
  };
  fails("A,2015-01-06,1,1,1\n", "expected 6 columns");
  fails("A,2015-01-06,1,abc,1,1\n", "non-numeric close");
  fails("A,2015-13-06,1,1,1,1\n", "bad date");
  fails("A,2015-01-06,1,-1,1,1\n", "positive");
  fails("A,2015-01-06,1,2,1.5,1\n", "high");
  fails("A,2015-01-06,1,1,1,-3\n", "volume");
  fails("A,2015-01-06,1,1,1,1.5\n", "volume");
}

TEST_CASE("short series and bad header") {
  {
    std::istringstream in("stock_id,date,open,close,high,volume\nA,2015-01-05,1,1,1,1\n"
                          "B,2015-01-05,1,1,1,1\nB,2015-01-06,1,1,1,1\n");
    auto msg = error_of([&] { parse_prices(in); });
    CHECK(contains(msg, "stock A"));
  }
  {
    std::istringstream in("id,date,close\n");
    CHECK(contains(error_of([&] { parse_prices(in); }), "header"));
  }
}

TEST_CASE("news lines become documents") {
  std::istringstream in(
      "{\"doc_id\":\"n1\",\"date\":\"2015-01-05\",\"stock_id\":\"600030\",\"tokens\":\"利好 升值\"}\n"
      "\n"
      "{\"doc_id\":\"n2\",\"date\":\"2015-01-05\",\"stock_id\":\"600519\",\"tokens\":\"亏损\"}\n"
      "{\"doc_id\":\"n3\",\"date\":\"2015-01-06\",\"stock_id\":\"600030\",\"tokens\":\"a b c\"}\n");
  auto docs = parse_news(in);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].tokens == std::vector<std::string>{"利好", "升值"});
  CHECK(docs[0].stock_id == "600030");
  CHECK(docs[1].stock_id == "600519");
  CHECK(docs[2].stock_id == "600030");
  CHECK(docs[2].date == Date{2015, 1, 6});
  CHECK(docs[2].tokens.size() == 3);
}

TEST_CASE("bad news lines name their line") {
  auto fails = [](const std::string& line, const std::string& what) {
    std::istringstream in(
        "{\"doc_id\":\"n1\",\"date\":\"2015-01-05\",\"stock_id\":\"A\",\"tokens\":\"x\"}\n" + line + "\n");
    auto msg = error_of([&] { parse_news(in); });
    CHECK_MESSAGE(contains(msg, "line 2"), msg);
    CHECK_MESSAGE(contains(msg, what), msg);
  };
  fails("{\"doc_id\":\"n2\",\"date\":\"2015-01-05\",\"stock_id\":\"A\",\"tokens\":\"\"}", "empty token list");
  fails("{\"doc_id\":\"n2\",\"date\":\"2015-01-05\",\"tokens\":\"x\"}", "stock_id");
  fails("{\"doc_id\":\"n2\",\"date\":\"2015-01-05\",", "malformed");
  fails("{\"doc_id\":\"n2\",\"date\":\"05/01/2015\",\"stock_id\":\"A\",\"tokens\":\"x\"}", "bad date");
  fails("{\"doc_id\":\"n2\",\"date\":\"2015-01-05\",\"stock_id\":\"A\",\"tokens\":\"x  y\"}", "empty token");
  fails("[1,2]", "object");
}

TEST_CASE("align attributes news to trading days") {
  auto prices = make_series("A", {{"2015-01-08", 10}, {"2015-01-09", 11}, {"2015-01-12", 12}});

  SUBCASE("one document on day 2") {
    auto a = align(prices, {doc("n", "2015-01-09", "A", {"x", "y"})});
    REQUIRE(a.days.size() == 3);
    CHECK(a.days[0].news.tokens.empty());
    CHECK(a.days[1].news.tokens == std::vector<std::string>{"x", "y"});
    CHECK(a.days[2].news.tokens.empty());
    CHECK(a.days[1].close == 11);
  }
  SUBCASE("same-day documents concatenate in input order") {
    auto a = align(prices, {doc("1", "2015-01-08", "A", {"a"}), doc("2", "2015-01-08", "A", {"b"})});
    CHECK(a.days[0].news.tokens == std::vector<std::string>{"a", "b"});
  }
  SUBCASE("weekend news merges into the next trading day") {
    auto a = align(prices, {doc("w", "2015-01-10", "A", {"weekend"}),
                            doc("m", "2015-01-12", "A", {"monday"})});
    CHECK(a.days[1].news.tokens.empty());
    CHECK(a.days[2].news.tokens == std::vector<std::string>{"weekend", "monday"});
  }
  SUBCASE("news after the last day is dropped and counted; other stocks ignored") {
    auto a = align(prices, {doc("late", "2015-01-13", "A", {"p", "q"}),
                            doc("other", "2015-01-08", "B", {"z"})});
    CHECK(a.dropped_documents == 1);
    CHECK(a.dropped_tokens == 2);
    for (const auto& day : a.days) CHECK(day.news.tokens.empty());
  }
}

TEST_CASE("align is total and conserves tokens (property)") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    PriceSeries prices{"S", {}};
    int day_no = 1 + static_cast<int>(gen() % 5);
    const int bars = 2 + static_cast<int>(gen() % 12);
    for (int i = 0; i < bars; ++i) {
      prices.bars.push_back({Date{2015, 3, static_cast<unsigned>(day_no)}, 1.0, 1.0, 1.0, 0});
      day_no += 1 + static_cast<int>(gen() % 3);
    }
    const Date last = prices.bars.back().date;
    std::vector<Document> docs;
    std::size_t expected_tokens = 0, late_tokens = 0;
    const int ndocs = static_cast<int>(gen() % 10);
    for (int i = 0; i < ndocs; ++i) {
      Document dd{"x", Date{2015, 3, static_cast<unsigned>(1 + gen() % 31)}, gen() % 4 ? "S" : "T", {}};
      const int nt = 1 + static_cast<int>(gen() % 4);
      for (int k = 0; k < nt; ++k) dd.tokens.push_back("t" + std::to_string(gen() % 9));
      if (dd.stock_id == "S") (dd.date <= last ? expected_tokens : late_tokens) += dd.tokens.size();
      docs.push_back(dd);
    }
    auto a = align(prices, docs);
    REQUIRE(a.days.size() == prices.bars.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < a.days.size(); ++i) {
      CHECK(a.days[i].date == prices.bars[i].date);
      total += a.days[i].news.tokens.size();
    }
    CHECK(total == expected_tokens);
    CHECK(a.dropped_tokens == late_tokens);
  }
}

TEST_CASE("write then parse reproduces prices and news") {
  std::vector<PriceSeries> prices = {make_series("A", {{"2015-01-05", 10.125}, {"2015-01-06", 1.0 / 3.0}}),
                                     make_series("B", {{"2015-01-05", 7}, {"2015-01-07", 7.5}})};
  prices[0].bars[0].volume = 123456789012;
  std::stringstream ps;
  write_prices(ps, prices);
  auto back = parse_prices(ps);
  REQUIRE(back.size() == prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    CHECK(back[i].stock_id == prices[i].stock_id);
    REQUIRE(back[i].bars.size() == prices[i].bars.size());
    for (std::size_t k = 0; k < prices[i].bars.size(); ++k) {
      CHECK(back[i].bars[k].date == prices[i].bars[k].date);
      CHECK(back[i].bars[k].close == prices[i].bars[k].close);
      CHECK(back[i].bars[k].volume == prices[i].bars[k].volume);
    }
  }

  std::vector<Document> docs = {doc("n\"1", "2015-01-05", "A", {"利好", "升值"}),
                                doc("n2", "2015-01-06", "B", {"x"})};
  std::stringstream ns;
  write_news(ns, docs);
  auto docs_back = parse_news(ns);
  REQUIRE(docs_back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(docs_back[i].doc_id == docs[i].doc_id);
    CHECK(docs_back[i].date == docs[i].date);
    CHECK(docs_back[i].stock_id == docs[i].stock_id);
    CHECK(docs_back[i].tokens == docs[i].tokens);
  }
}
