#include "newsrnn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "newsrnn/checkpoint.hpp"
#include "newsrnn/errors.hpp"
#include "newsrnn/random.hpp"

namespace newsrnn {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

TrainSequence training_sequence(const FeatureSequence& features, std::size_t train_steps) {
  TrainSequence seq;
  for (std::size_t k = 0; k < train_steps; ++k) {
    const auto& step = features.steps[k];
    seq.rets.push_back(step.ret);
    seq.hists.push_back(step.hist);
    seq.labels.push_back(*step.next_label);
  }
  return seq;
}

std::vector<LagSample> train_part(const std::vector<LagSample>& samples, std::size_t train_steps) {
  std::vector<LagSample> out;
  for (const auto& s : samples) {
    if (s.step < train_steps) out.push_back(s);
  }
  return out;
}

StockReport failed(const std::string& stock_id, const std::string& error) {
  StockReport r;
  r.stock_id = stock_id;
  r.error = error;
  return r;
}

void fill_counts(StockReport& report, const PreparedStock& stock) {
  report.trading_days = stock.aligned.days.size();
  report.news_days = 0;
  for (const auto& d : stock.aligned.days) report.news_days += d.news.tokens.empty() ? 0 : 1;
}

}  // namespace

std::size_t split_index(std::size_t count, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split fraction must lie in (0,1)");
  // The small nudge keeps products like 0.29 * 100 from flooring to 28.
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(count) + 1e-9));
}

std::pair<FeatureSequence, FeatureSequence> split(const FeatureSequence& features, double fraction) {
  const std::size_t s = split_index(features.size(), fraction);
  if (s == 0 || s >= features.size()) {
    throw DataError("stock " + features.stock_id + ": split leaves an empty side (" +
                    std::to_string(features.size()) + " days)");
  }
  FeatureSequence train{features.stock_id, features.bins, {}};
  FeatureSequence test{features.stock_id, features.bins, {}};
  train.steps.assign(features.steps.begin(), features.steps.begin() + static_cast<std::ptrdiff_t>(s));
  test.steps.assign(features.steps.begin() + static_cast<std::ptrdiff_t>(s), features.steps.end());
  return {std::move(train), std::move(test)};
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("prediction and label counts differ");
  }
  if (predictions.empty()) throw std::invalid_argument("accuracy of an empty prediction set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

Dataset load_dataset(const ExperimentConfig& config) {
  validate(config);
  if (config.prices.empty()) throw ConfigError("no price file configured (key 'prices')");
  if (config.news.empty()) throw ConfigError("no news file configured (key 'news')");
  for (const auto* p : {&config.prices, &config.news}) {
    if (!std::filesystem::exists(*p)) throw ConfigError("file not found: " + p->string());
  }
  if (!config.seeds.empty() && !std::filesystem::exists(config.seeds)) {
    throw ConfigError("file not found: " + config.seeds.string());
  }

  Dataset data;
  auto prices = load_prices(config.prices);
  data.docs = load_news(config.news);
  data.seeds = config.seeds.empty() ? default_seed_sets() : load_seed_sets(config.seeds);

  std::vector<const PriceSeries*> selected;
  if (config.stocks.empty()) {
    for (const auto& s : prices) selected.push_back(&s);
  } else {
    std::set<std::string> requested;
    for (const auto& id : config.stocks) {
      if (!requested.insert(id).second) continue;
      auto it = std::find_if(prices.begin(), prices.end(),
                             [&](const PriceSeries& s) { return s.stock_id == id; });
      if (it == prices.end()) {
        data.failures.push_back({id, "unknown stock id"});
      } else {
        selected.push_back(&*it);
      }
    }
  }

  for (const auto* series : selected) {
    PreparedStock stock;
    stock.aligned = align(*series, data.docs);
    const std::size_t days = stock.aligned.days.size();
    if (days < 3) {
      data.failures.push_back({series->stock_id, "needs at least 3 trading days"});
      continue;
    }
    const std::size_t steps = days - 1;
    stock.train_steps = split_index(steps, config.split);
    // Training needs one full lag window; testing needs one labelled day.
    if (stock.train_steps < kPriceLags || stock.train_steps + 2 > steps) {
      data.failures.push_back({series->stock_id, "too few trading days (" + std::to_string(days) +
                                                     ") for a train/test split"});
      continue;
    }
    stock.cutoff = stock.aligned.days[stock.train_steps].date;
    data.stocks.push_back(std::move(stock));
  }
  return data;
}

PolarityLexicon build_training_lexicon(const Dataset& data, const LexiconParams& params) {
  std::map<std::string, Date> cutoff;
  for (const auto& s : data.stocks) cutoff.emplace(s.aligned.stock_id, s.cutoff);
  std::vector<Document> corpus;
  for (const auto& doc : data.docs) {
    auto it = cutoff.find(doc.stock_id);
    if (it != cutoff.end() && doc.date <= it->second) corpus.push_back(doc);
  }
  if (corpus.empty()) throw DataError("no training-window news to build the lexicon from");
  return build_lexicon(corpus, data.seeds, params);
}

std::uint64_t stock_seed(std::uint64_t global_seed, const std::string& stock_id, std::uint64_t stream) {
  return mix_seed(mix_seed(global_seed, fnv1a(stock_id)), stream);
}

FeatureSequence featurize(const PreparedStock& stock, const PolarityLexicon& lexicon,
                          const HistogramSpec& spec, const ExperimentConfig& config) {
  return assemble(stock.aligned, lexicon, spec, config.norm);
}

TrainedStock train_stock(const PreparedStock& stock, const PolarityLexicon& lexicon,
                         const HistogramSpec& spec, const ExperimentConfig& config) {
  TrainedStock trained;
  trained.features = featurize(stock, lexicon, spec, config);
  trained.train_steps = stock.train_steps;
  const std::string& id = stock.aligned.stock_id;

  TrainConfig tc = config.train;
  tc.seed = stock_seed(config.seed, id, 0);
  auto result = train({training_sequence(trained.features, trained.train_steps)}, config.model_dims(), tc);
  trained.rnn = std::move(result.params);
  trained.rnn_epoch_loss = std::move(result.epoch_loss);

  LinearHyperparams hp = config.baseline;
  hp.seed = stock_seed(config.seed, id, 1);
  trained.price_model =
      train_linear(train_part(build_lag_samples(trained.features, false), trained.train_steps), hp);
  hp.seed = stock_seed(config.seed, id, 2);
  trained.news_model =
      train_linear(train_part(build_lag_samples(trained.features, true), trained.train_steps), hp);
  return trained;
}

StockReport evaluate_stock(const TrainedStock& trained, const PreparedStock& stock) {
  const auto& steps = trained.features.steps;
  const std::size_t s = trained.train_steps;
  StockReport report;
  report.stock_id = trained.features.stock_id;
  fill_counts(report, stock);
  report.feature_steps = steps.size();
  report.train_steps = s;
  report.test_steps = steps.size() - s;

  std::vector<double> rets;
  std::vector<std::vector<double>> hists;
  for (const auto& step : steps) {
    rets.push_back(step.ret);
    hists.push_back(step.hist);
  }
  const auto trace = forward(trained.rnn, rets, hists);

  const auto price_samples = build_lag_samples(trained.features, false);
  const auto news_samples = build_lag_samples(trained.features, true);
  std::map<std::size_t, const LagSample*> price_at, news_at;
  for (const auto& x : price_samples) price_at[x.step] = &x;
  for (const auto& x : news_samples) news_at[x.step] = &x;
  for (const auto& x : price_samples) report.train_samples += x.step < s ? 1 : 0;

  std::array<std::vector<int>, kMethodCount> preds;
  std::vector<int> truth;
  for (std::size_t k = s; k < steps.size(); ++k) {
    if (!steps[k].next_label) continue;
    TestPrediction p;
    p.date = steps[k + 1].date;
    p.label = *steps[k].next_label;
    p.predicted[0] = predict_linear(trained.price_model, price_at.at(k)->x);
    p.predicted[1] = predict_linear(trained.news_model, news_at.at(k)->x);
    const auto rnn = predict_from_probs(trace.steps[k].probs);
    p.predicted[2] = rnn.label;
    p.rnn_up_probability = rnn.up_probability;
    for (std::size_t m = 0; m < kMethodCount; ++m) preds[m].push_back(p.predicted[m]);
    truth.push_back(p.label);
    report.predictions.push_back(p);
  }
  report.test_samples = truth.size();
  for (std::size_t m = 0; m < kMethodCount; ++m) {
    auto& score = report.scores[m];
    score.total = truth.size();
    for (std::size_t i = 0; i < truth.size(); ++i) score.correct += preds[m][i] == truth[i] ? 1 : 0;
    score.accuracy = accuracy(preds[m], truth);
  }
  return report;
}

std::size_t EvaluationReport::succeeded() const {
  return static_cast<std::size_t>(
      std::count_if(stocks.begin(), stocks.end(), [](const StockReport& s) { return !s.error; }));
}

std::vector<GroupMean> group_means(const std::vector<StockReport>& stocks) {
  std::vector<const StockReport*> ok;
  for (const auto& s : stocks) {
    if (!s.error) ok.push_back(&s);
  }
  auto mean_of = [](const std::string& name, const std::vector<const StockReport*>& members) {
    GroupMean g;
    g.name = name;
    for (const auto* s : members) g.stocks.push_back(s->stock_id);
    for (std::size_t m = 0; m < kMethodCount; ++m) {
      double sum = 0.0;
      for (const auto* s : members) sum += s->scores[m].accuracy;
      g.accuracy[m] = members.empty() ? 0.0 : sum / static_cast<double>(members.size());
    }
    return g;
  };
  std::vector<GroupMean> groups;
  groups.push_back(mean_of("all", ok));

  auto by_density = ok;
  std::stable_sort(by_density.begin(), by_density.end(), [](const StockReport* a, const StockReport* b) {
    // news_days / trading_days compared without division
    const auto lhs = static_cast<unsigned long long>(a->news_days) * b->trading_days;
    const auto rhs = static_cast<unsigned long long>(b->news_days) * a->trading_days;
    if (lhs != rhs) return lhs > rhs;
    return a->stock_id < b->stock_id;
  });
  const std::size_t high = (by_density.size() + 1) / 2;
  groups.push_back(mean_of("high_news", {by_density.begin(), by_density.begin() + static_cast<std::ptrdiff_t>(high)}));
  groups.push_back(mean_of("low_news", {by_density.begin() + static_cast<std::ptrdiff_t>(high), by_density.end()}));
  return groups;
}

void write_report_json(std::ostream& out, const EvaluationReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  ordered_json cfg = ordered_json::object();
  for (auto key : config_keys()) cfg[std::string(key)] = get_config_value(report.config, key);
  j["config"] = cfg;
  j["lexicon"] = {
      {"documents", report.lexicon_docs},
      {"vocabulary", report.lexicon_size},
      {"K", report.lexicon_params.k},
      {"epsilon", report.lexicon_params.epsilon},
      {"min_df", report.lexicon_params.min_df},
      {"exclude_seeds", report.lexicon_params.exclude_seeds},
      {"p_star", report.p_star},
      {"n_star", report.n_star},
  };
  ordered_json stocks = ordered_json::array();
  for (const auto& s : report.stocks) {
    ordered_json e;
    e["stock_id"] = s.stock_id;
    if (s.error) {
      e["status"] = "error";
      e["error"] = *s.error;
      stocks.push_back(e);
      continue;
    }
    e["status"] = "ok";
    e["trading_days"] = s.trading_days;
    e["news_days"] = s.news_days;
    e["feature_steps"] = s.feature_steps;
    e["train_steps"] = s.train_steps;
    e["test_steps"] = s.test_steps;
    e["train_samples"] = s.train_samples;
    e["test_samples"] = s.test_samples;
    ordered_json methods = ordered_json::object();
    for (std::size_t m = 0; m < kMethodCount; ++m) {
      methods[kMethodNames[m]] = {{"accuracy", s.scores[m].accuracy},
                                  {"correct", s.scores[m].correct},
                                  {"total", s.scores[m].total}};
    }
    e["methods"] = methods;
    stocks.push_back(e);
  }
  j["stocks"] = stocks;
  ordered_json groups = ordered_json::array();
  for (const auto& g : report.groups) {
    ordered_json e;
    e["group"] = g.name;
    e["stocks"] = g.stocks;
    for (std::size_t m = 0; m < kMethodCount; ++m) {
      if (g.stocks.empty()) {
        e[kMethodNames[m]] = nullptr;
      } else {
        e[kMethodNames[m]] = g.accuracy[m];
      }
    }
    groups.push_back(e);
  }
  j["means"] = groups;
  out << j.dump(2) << '\n';
}

void write_report_text(std::ostream& out, const EvaluationReport& report) {
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %6s %6s %6s %14s %18s %15s\n", "stock", "days", "news",
                "test", "price_linear", "price_news_linear", "price_news_rnn");
  out << line;
  for (const auto& s : report.stocks) {
    if (s.error) {
      std::snprintf(line, sizeof(line), "%-16s error: ", s.stock_id.c_str());
      out << line << *s.error << '\n';
      continue;
    }
    std::snprintf(line, sizeof(line), "%-16s %6zu %6zu %6zu %14s %18s %15s\n", s.stock_id.c_str(),
                  s.trading_days, s.news_days, s.test_samples, fixed(s.scores[0].accuracy, 4).c_str(),
                  fixed(s.scores[1].accuracy, 4).c_str(), fixed(s.scores[2].accuracy, 4).c_str());
    out << line;
  }
  out << '\n';
  for (const auto& g : report.groups) {
    auto cell = [&](std::size_t m) { return g.stocks.empty() ? std::string("-") : fixed(g.accuracy[m], 4); };
    std::snprintf(line, sizeof(line), "%-16s %6zu %6s %6s %14s %18s %15s\n",
                  ("mean:" + g.name).c_str(), g.stocks.size(), "", "", cell(0).c_str(),
                  cell(1).c_str(), cell(2).c_str());
    out << line;
  }
}

void write_predictions_csv(std::ostream& out, const StockReport& stock) {
  out << "date,label";
  for (auto name : kMethodNames) out << ',' << name;
  out << ",rnn_up_probability\n";
  char buf[32];
  for (const auto& p : stock.predictions) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.rnn_up_probability);
    out << to_string(p.date) << ',' << p.label;
    for (int v : p.predicted) out << ',' << v;
    out << ',' << buf << '\n';
  }
}

namespace {

EvaluationReport base_report(const ExperimentConfig& config, const PolarityLexicon& lexicon) {
  EvaluationReport report;
  report.config = config;
  report.lexicon_docs = lexicon.num_docs();
  report.lexicon_size = lexicon.size();
  report.lexicon_params = lexicon.params();
  report.p_star = lexicon.p_star();
  report.n_star = lexicon.n_star();
  return report;
}

void finish_report(EvaluationReport& report, const Dataset& data, const OutputPaths& paths) {
  for (const auto& f : data.failures) report.stocks.push_back(failed(f.stock_id, f.error));
  std::stable_sort(report.stocks.begin(), report.stocks.end(),
                   [](const StockReport& a, const StockReport& b) { return a.stock_id < b.stock_id; });
  report.groups = group_means(report.stocks);
  for (const auto& s : report.stocks) {
    if (s.error) continue;
    auto out = open_out(paths.predictions(s.stock_id));
    write_predictions_csv(out, s);
  }
  {
    auto out = open_out(paths.report_json());
    write_report_json(out, report);
  }
  {
    auto out = open_out(paths.report_text());
    write_report_text(out, report);
  }
}

void save_models(const OutputPaths& paths, const ExperimentConfig& config, const std::string& id,
                 const TrainedStock& trained) {
  TrainConfig tc = config.train;
  tc.seed = stock_seed(config.seed, id, 0);
  save_checkpoint(paths.checkpoint(id), Checkpoint{trained.rnn, tc.seed, describe(tc)});
  {
    auto out = open_out(paths.price_model(id));
    write_linear_tsv(out, trained.price_model);
  }
  {
    auto out = open_out(paths.news_model(id));
    write_linear_tsv(out, trained.news_model);
  }
}

}  // namespace

PolarityLexicon run_lexicon_stage(const ExperimentConfig& config, const Dataset& data) {
  auto lexicon = build_training_lexicon(data, config.lexicon);
  auto out = open_out(OutputPaths{config.out}.lexicon());
  lexicon.write_tsv(out);
  return lexicon;
}

void run_featurize_stage(const ExperimentConfig& config, const Dataset& data,
                         const PolarityLexicon& lexicon) {
  const auto spec = make_spec(lexicon, config.bins);
  auto out = open_out(OutputPaths{config.out}.features());
  bool header = true;
  for (const auto& stock : data.stocks) {
    write_features_csv(out, featurize(stock, lexicon, spec, config), header);
    header = false;
  }
}

std::vector<StockFailure> run_train_stage(const ExperimentConfig& config, const Dataset& data,
                                          const PolarityLexicon& lexicon) {
  const OutputPaths paths{config.out};
  const auto spec = make_spec(lexicon, config.bins);
  std::vector<StockFailure> failures = data.failures;
  for (const auto& stock : data.stocks) {
    const auto& id = stock.aligned.stock_id;
    try {
      save_models(paths, config, id, train_stock(stock, lexicon, spec, config));
    } catch (const std::exception& e) {
      failures.push_back({id, e.what()});
    }
  }
  return failures;
}

EvaluationReport run_evaluate_stage(const ExperimentConfig& config, const Dataset& data) {
  const OutputPaths paths{config.out};
  const auto lexicon = PolarityLexicon::load_tsv(paths.lexicon());
  const auto spec = make_spec(lexicon, config.bins);
  EvaluationReport report = base_report(config, lexicon);
  for (const auto& stock : data.stocks) {
    const auto& id = stock.aligned.stock_id;
    try {
      TrainedStock trained;
      trained.features = featurize(stock, lexicon, spec, config);
      trained.train_steps = stock.train_steps;
      trained.rnn = load_checkpoint(paths.checkpoint(id)).params;
      if (trained.rnn.dims.news_width != config.bins) {
        throw DataError("checkpoint histogram width does not match features.bins");
      }
      std::ifstream price_in(paths.price_model(id));
      std::ifstream news_in(paths.news_model(id));
      if (!price_in || !news_in) throw DataError("missing linear model files for " + id);
      trained.price_model = read_linear_tsv(price_in);
      trained.news_model = read_linear_tsv(news_in);
      report.stocks.push_back(evaluate_stock(trained, stock));
    } catch (const std::exception& e) {
      report.stocks.push_back(failed(id, e.what()));
    }
  }
  finish_report(report, data, paths);
  return report;
}

EvaluationReport run_experiment(const ExperimentConfig& config) {
  const OutputPaths paths{config.out};
  const Dataset data = load_dataset(config);
  if (data.stocks.empty()) {
    // Nothing survived loading; report the per-stock failures only.
    EvaluationReport report;
    report.config = config;
    finish_report(report, data, paths);
    return report;
  }
  const auto lexicon = run_lexicon_stage(config, data);
  const auto spec = make_spec(lexicon, config.bins);
  EvaluationReport report = base_report(config, lexicon);
  for (const auto& stock : data.stocks) {
    const auto& id = stock.aligned.stock_id;
    try {
      const auto trained = train_stock(stock, lexicon, spec, config);
      save_models(paths, config, id, trained);
      report.stocks.push_back(evaluate_stock(trained, stock));
    } catch (const std::exception& e) {
      report.stocks.push_back(failed(id, e.what()));
    }
  }
  finish_report(report, data, paths);
  return report;
}

}  // namespace newsrnn
