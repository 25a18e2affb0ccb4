#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "newsrnn/baseline.hpp"
#include "newsrnn/config.hpp"
#include "newsrnn/corpus.hpp"
#include "newsrnn/features.hpp"
#include "newsrnn/lexicon.hpp"
#include "newsrnn/model.hpp"

namespace newsrnn {

enum class Method { kPriceLinear = 0, kPriceNewsLinear = 1, kPriceNewsRnn = 2 };
inline constexpr std::size_t kMethodCount = 3;
inline constexpr std::array<const char*, kMethodCount> kMethodNames = {
    "price_linear", "price_news_linear", "price_news_rnn"};

// floor(fraction * count); fraction must lie in (0,1).
std::size_t split_index(std::size_t count, double fraction);

// Chronological split of feature steps. Throws DataError if either side is empty.
std::pair<FeatureSequence, FeatureSequence> split(const FeatureSequence& features, double fraction);

// Fraction of positions where predictions equal labels. Throws
// std::invalid_argument on a length mismatch or empty input.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

// One stock after alignment, with its chronological split fixed.
struct PreparedStock {
  AlignedSeries aligned;
  std::size_t train_steps = 0;  // feature steps [0, train_steps) are training data
  Date cutoff;                  // last trading day whose news may feed the lexicon
};

struct StockFailure {
  std::string stock_id;
  std::string error;
};

struct Dataset {
  std::vector<PreparedStock> stocks;
  std::vector<StockFailure> failures;
  std::vector<Document> docs;
  SeedSets seeds;
};

// Loads prices/news/seeds named by the config, aligns the selected stocks and
// fixes their split. Unknown or too-short stocks become failures; unreadable
// files throw DataError.
Dataset load_dataset(const ExperimentConfig& config);

// Lexicon over the training-window articles of every prepared stock.
PolarityLexicon build_training_lexicon(const Dataset& data, const LexiconParams& params);

struct TrainedStock {
  FeatureSequence features;
  std::size_t train_steps = 0;
  RnnParams rnn;
  std::vector<double> rnn_epoch_loss;
  LinearModel price_model;
  LinearModel news_model;
};

// Per-stock model seeds; depend only on the global seed and the stock id.
std::uint64_t stock_seed(std::uint64_t global_seed, const std::string& stock_id, std::uint64_t stream);

FeatureSequence featurize(const PreparedStock& stock, const PolarityLexicon& lexicon,
                          const HistogramSpec& spec, const ExperimentConfig& config);

TrainedStock train_stock(const PreparedStock& stock, const PolarityLexicon& lexicon,
                         const HistogramSpec& spec, const ExperimentConfig& config);

struct TestPrediction {
  Date date;  // the predicted day
  int label = 0;
  std::array<int, kMethodCount> predicted{};
  double rnn_up_probability = 0.5;
};

struct MethodScore {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

struct StockReport {
  std::string stock_id;
  std::optional<std::string> error;
  std::size_t trading_days = 0;
  std::size_t news_days = 0;
  std::size_t feature_steps = 0;
  std::size_t train_steps = 0;
  std::size_t test_steps = 0;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::array<MethodScore, kMethodCount> scores{};
  std::vector<TestPrediction> predictions;
};

// Predicts every labelled test step with all three methods. The RNN is run
// over the whole history so test predictions see all earlier days.
StockReport evaluate_stock(const TrainedStock& trained, const PreparedStock& stock);

struct GroupMean {
  std::string name;
  std::vector<std::string> stocks;
  std::array<double, kMethodCount> accuracy{};
};

struct EvaluationReport {
  ExperimentConfig config;
  std::size_t lexicon_docs = 0;
  std::size_t lexicon_size = 0;
  LexiconParams lexicon_params;
  std::vector<std::string> p_star;
  std::vector<std::string> n_star;
  std::vector<StockReport> stocks;
  std::vector<GroupMean> groups;  // all, high_news, low_news

  std::size_t succeeded() const;
};

// Group means over successful stocks; high_news holds the ceil(n/2) stocks
// with the largest share of news days.
std::vector<GroupMean> group_means(const std::vector<StockReport>& stocks);

void write_report_json(std::ostream& out, const EvaluationReport& report);
void write_report_text(std::ostream& out, const EvaluationReport& report);
void write_predictions_csv(std::ostream& out, const StockReport& stock);

// Output layout under config.out.
struct OutputPaths {
  std::filesystem::path root;
  std::filesystem::path lexicon() const { return root / "lexicon.tsv"; }
  std::filesystem::path features() const { return root / "features.csv"; }
  std::filesystem::path report_json() const { return root / "report.json"; }
  std::filesystem::path report_text() const { return root / "report.txt"; }
  std::filesystem::path checkpoint(const std::string& stock) const {
    return root / "models" / (stock + ".ckpt");
  }
  std::filesystem::path price_model(const std::string& stock) const {
    return root / "models" / (stock + ".price_linear.tsv");
  }
  std::filesystem::path news_model(const std::string& stock) const {
    return root / "models" / (stock + ".price_news_linear.tsv");
  }
  std::filesystem::path predictions(const std::string& stock) const {
    return root / "predictions" / (stock + ".csv");
  }
};

// End to end: align, build the lexicon on training news, featurize, train all
// three methods per stock, evaluate on the test window and write every output
// file. Stage failures are recorded per stock.
EvaluationReport run_experiment(const ExperimentConfig& config);

// Individual stages used by the CLI subcommands.
PolarityLexicon run_lexicon_stage(const ExperimentConfig& config, const Dataset& data);
void run_featurize_stage(const ExperimentConfig& config, const Dataset& data,
                         const PolarityLexicon& lexicon);
std::vector<StockFailure> run_train_stage(const ExperimentConfig& config, const Dataset& data,
                                          const PolarityLexicon& lexicon);
// Reads the lexicon and models written by the train stage.
EvaluationReport run_evaluate_stage(const ExperimentConfig& config, const Dataset& data);

}  // namespace newsrnn
