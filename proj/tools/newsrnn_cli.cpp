// newsrnn: news-polarity lexicon + recurrent model pipeline for next-day
// stock direction.
//
//   newsrnn synth     --out DIR [generator options]
//   newsrnn lexicon   --config FILE [overrides]
//   newsrnn featurize --config FILE [--lexicon FILE] [overrides]
//   newsrnn train     --config FILE [overrides]
//   newsrnn evaluate  --config FILE [overrides]
//   newsrnn run       --config FILE [overrides]
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 every stock failed.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "newsrnn/config.hpp"
#include "newsrnn/errors.hpp"
#include "newsrnn/experiment.hpp"
#include "newsrnn/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAllFailed = 3;

struct PipelineOptions {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_pipeline_options(CLI::App* cmd, PipelineOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file (key = value)");
  for (auto key : newsrnn::config_keys()) {
    const std::string name(key);
    cmd->add_option_function<std::string>(
        "--" + name, [&opts, name](const std::string& v) { opts.overrides[name] = v; },
        std::string(newsrnn::config_key_help(key)));
  }
}

newsrnn::ExperimentConfig resolve_config(const PipelineOptions& opts) {
  newsrnn::ExperimentConfig config;
  if (!opts.config_path.empty()) config = newsrnn::load_config(opts.config_path);
  for (const auto& [key, value] : opts.overrides) newsrnn::set_config_value(config, key, value);
  newsrnn::validate(config);
  return config;
}

int report_status(const newsrnn::EvaluationReport& report) {
  newsrnn::write_report_text(std::cout, report);
  if (report.succeeded() == 0) {
    std::cerr << "error: every stock failed\n";
    return kExitAllFailed;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"News-polarity features and a two-branch RNN for next-day stock direction"};
  app.require_subcommand(1);

  newsrnn::SynthParams synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "generate a planted-signal dataset");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--stocks", synth.stocks, "number of stocks")->capture_default_str();
  synth_cmd->add_option("--days", synth.days, "trading days per stock")->capture_default_str();
  synth_cmd->add_option("--signal", synth.signal, "directional edge of news in [0, 0.5]")->capture_default_str();
  synth_cmd->add_option("--news-rate", synth.news_rate, "probability of news on a day")->capture_default_str();
  synth_cmd->add_option("--impact-days", synth.impact_days, "days an article keeps moving the price")
      ->capture_default_str();
  synth_cmd->add_option("--cluster-size", synth.cluster_size, "tokens per sentiment cluster")->capture_default_str();
  synth_cmd->add_option("--neutral-size", synth.neutral_size, "neutral filler tokens")->capture_default_str();
  synth_cmd->add_option("--cluster-share", synth.cluster_share, "share of article tokens from its cluster")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "generator seed")->capture_default_str();

  PipelineOptions lex_opts, feat_opts, train_opts, eval_opts, run_opts;
  std::string lexicon_path;
  auto* lex_cmd = app.add_subcommand("lexicon", "build the polarity lexicon from training-window news");
  add_pipeline_options(lex_cmd, lex_opts);
  auto* feat_cmd = app.add_subcommand("featurize", "write per-day returns, labels and news histograms");
  add_pipeline_options(feat_cmd, feat_opts);
  feat_cmd->add_option("--lexicon", lexicon_path, "existing lexicon TSV (default: build one)");
  auto* train_cmd = app.add_subcommand("train", "train the RNN and both linear baselines per stock");
  add_pipeline_options(train_cmd, train_opts);
  auto* eval_cmd = app.add_subcommand("evaluate", "score trained models on the test window");
  add_pipeline_options(eval_cmd, eval_opts);
  auto* run_cmd = app.add_subcommand("run", "lexicon, features, training and evaluation end to end");
  add_pipeline_options(run_cmd, run_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) {
      auto data = newsrnn::synthesize(synth);
      newsrnn::write_synth(synth_out, data);
      std::cout << "wrote " << data.prices.size() << " stocks, " << data.news.size()
                << " articles to " << synth_out << "\n"
                << "achievable accuracy: " << newsrnn::bayes_accuracy(synth)
                << " (same-day news only: " << newsrnn::same_day_news_accuracy(synth) << ")\n";
      return kExitOk;
    }
    if (*lex_cmd) {
      auto config = resolve_config(lex_opts);
      auto data = newsrnn::load_dataset(config);
      auto lexicon = newsrnn::run_lexicon_stage(config, data);
      std::cout << "lexicon: " << lexicon.size() << " tokens from " << lexicon.num_docs()
                << " articles -> " << newsrnn::OutputPaths{config.out}.lexicon().string() << "\n";
      return kExitOk;
    }
    if (*feat_cmd) {
      auto config = resolve_config(feat_opts);
      auto data = newsrnn::load_dataset(config);
      auto lexicon = lexicon_path.empty() ? newsrnn::run_lexicon_stage(config, data)
                                          : newsrnn::PolarityLexicon::load_tsv(lexicon_path);
      newsrnn::run_featurize_stage(config, data, lexicon);
      std::cout << "features -> " << newsrnn::OutputPaths{config.out}.features().string() << "\n";
      return data.stocks.empty() ? kExitAllFailed : kExitOk;
    }
    if (*train_cmd) {
      auto config = resolve_config(train_opts);
      auto data = newsrnn::load_dataset(config);
      auto lexicon = newsrnn::run_lexicon_stage(config, data);
      auto failures = newsrnn::run_train_stage(config, data, lexicon);
      for (const auto& f : failures) std::cerr << f.stock_id << ": " << f.error << "\n";
      const std::size_t total = data.stocks.size() + data.failures.size();
      std::cout << "trained " << total - failures.size() << " of " << total << " stocks\n";
      return failures.size() == total ? kExitAllFailed : kExitOk;
    }
    if (*eval_cmd) {
      auto config = resolve_config(eval_opts);
      auto data = newsrnn::load_dataset(config);
      return report_status(newsrnn::run_evaluate_stage(config, data));
    }
    if (*run_cmd) {
      auto config = resolve_config(run_opts);
      return report_status(newsrnn::run_experiment(config));
    }
  } catch (const newsrnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const newsrnn::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
