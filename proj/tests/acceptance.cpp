// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
// usage: acceptance <work-dir> <newsrnn-cli>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "gradcheck.hpp"
#include "newsrnn/experiment.hpp"
#include "newsrnn/synth.hpp"
#include "oracles.hpp"

using namespace newsrnn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using Docs = std::vector<std::vector<std::string>>;

Docs random_corpus(std::mt19937_64& gen, std::size_t ndocs, std::size_t vocab) {
  Docs docs(ndocs);
  for (std::size_t t = 0; t < vocab; ++t) docs[gen() % ndocs].push_back("w" + std::to_string(t));
  for (auto& d : docs) {
    const std::size_t extra = gen() % 6;
    for (std::size_t k = 0; k < extra; ++k) d.push_back("w" + std::to_string(gen() % vocab));
    if (d.empty()) d.push_back("w" + std::to_string(gen() % vocab));
  }
  return docs;
}

// Two distinct vocab tokens chosen at random as a one-word seed per side,
// sometimes two per side when the vocabulary allows.
SeedSets random_seeds(std::mt19937_64& gen, const std::vector<std::string>& vocab) {
  std::vector<std::string> pool = vocab;
  std::shuffle(pool.begin(), pool.end(), gen);
  const std::size_t per_side = pool.size() >= 6 && (gen() & 1u) ? 2 : 1;
  SeedSets s;
  s.pos.assign(pool.begin(), pool.begin() + static_cast<long>(per_side));
  s.neg.assign(pool.begin() + static_cast<long>(per_side), pool.begin() + static_cast<long>(2 * per_side));
  return s;
}

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// 1. Method ordering on the planted-signal market.
Outcome method_ordering(const fs::path& work) {
  SynthParams sp;  // 20 stocks x 600 days, signal 0.4, news on half the days
  sp.impact_days = 3;
  sp.seed = 1;
  const auto dir = work / "ordering";
  fs::remove_all(dir);
  write_synth(dir / "data", synthesize(sp));
  ExperimentConfig cfg;
  cfg.prices = dir / "data" / "prices.csv";
  cfg.news = dir / "data" / "news.jsonl";
  cfg.seeds = dir / "data" / "seeds.txt";
  cfg.out = dir / "out";
  cfg.lexicon.k = 5;
  auto report = run_experiment(cfg);
  const auto& all = report.groups.at(0).accuracy;
  const double lin = all[0], news = all[1], rnn = all[2];
  const bool ok = report.succeeded() == sp.stocks && lin < news && news < rnn && rnn - lin >= 0.05;
  return {ok, fmt("price_linear %.4f < price_news_linear %.4f < price_news_rnn %.4f, "
                  "rnn - price %.4f (need >= 0.05), %zu/%zu stocks",
                  lin, news, rnn, rnn - lin, report.succeeded(), sp.stocks)};
}

// 2. Backward pass against central differences.
Outcome gradient_oracle() {
  double worst = 0.0;
  std::size_t checked = 0, skipped = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto res = gradcheck::check(gradcheck::random_instance(seed * 7919), 1e-5, 1e-7);
    worst = std::max(worst, res.max_rel_error);
    checked += res.checked;
    skipped += res.skipped;
  }
  return {worst < 1e-4 && checked > 0,
          fmt("20 instances, %zu coordinates, %zu near a kink skipped, max relative error %.3g (< 1e-4)",
              checked, skipped, worst)};
}

// 3. Standard sets attain the exhaustive optimum.
Outcome lexicon_optimality() {
  std::mt19937_64 gen(303);
  std::size_t instances = 0, optimal = 0;
  while (instances < 50) {
    const std::size_t m = 4 + gen() % 7;  // 4..10 tokens
    auto docs = random_corpus(gen, 6 + gen() % 20, m);
    auto stats = CorpusStats::build(docs, 1);
    const std::size_t k = 1 + gen() % std::min<std::size_t>(3, stats.vocab_size() / 2);
    auto seeds = random_seeds(gen, stats.vocab());
    auto scores = seed_polarities(stats, seeds);
    auto sets = select_standard_sets(stats, seeds, k);
    std::vector<double> p, n;
    for (const auto& w : sets.pos) p.push_back(scores[*stats.id(w)]);
    for (const auto& w : sets.neg) n.push_back(scores[*stats.id(w)]);
    ++instances;
    if (oracle::set_objective(p, n) == oracle::best_objective(scores, k)) ++optimal;
  }
  return {optimal == instances, fmt("%zu/%zu corpora at the exhaustive maximum", optimal, instances)};
}

// 4. PMI, seed polarity and polarity against a naive recount.
Outcome pmi_equivalence() {
  std::mt19937_64 gen(404);
  double worst = 0.0;
  std::size_t values = 0;
  const double eps = kDefaultSmoothing;
  for (int c = 0; c < 20; ++c) {
    const std::size_t m = 6 + gen() % 10;  // up to 15 tokens
    auto docs = random_corpus(gen, 5 + gen() % 26, m);  // up to 30 docs
    auto stats = CorpusStats::build(docs, 1);
    const auto& vocab = stats.vocab();
    for (const auto& w : vocab)
      for (const auto& v : vocab) {
        worst = std::max(worst, rel_err(pmi(stats, w, v, eps), oracle::pmi(docs, w, v, eps)));
        ++values;
      }
    auto seeds = random_seeds(gen, vocab);
    for (const auto& w : vocab) {
      worst = std::max(worst, rel_err(seed_polarity(stats, seeds, w, eps),
                                      oracle::contrast(docs, w, seeds.pos, seeds.neg, eps)));
      ++values;
    }
    LexiconParams lp;
    lp.k = 1 + gen() % 3;
    lp.min_df = 1;
    lp.epsilon = eps;
    auto lex = build_lexicon(stats, seeds, lp);
    for (const auto& [w, score] : lex.scores()) {
      worst = std::max(worst, rel_err(score, oracle::contrast(docs, w, lex.p_star(), lex.n_star(), eps)));
      ++values;
    }
  }
  return {worst <= 1e-12, fmt("20 corpora, %zu values, max relative difference %.3g (<= 1e-12)", values, worst)};
}

// 5. Histogram mass, single-bin membership and refinement.
Outcome histogram_properties() {
  std::mt19937_64 gen(505);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::size_t bad_mass = 0, bad_membership = 0, bad_refine = 0, refine_checked = 0, on_edges = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    std::map<std::string, double, std::less<>> scores;
    const int m = 1 + static_cast<int>(gen() % 20);
    // A third of the instances use quarter-step values that land on bin edges.
    const bool grid = inst % 3 == 0;
    for (int i = 0; i < m; ++i)
      scores["w" + std::to_string(i)] = grid ? static_cast<double>(static_cast<int>(gen() % 17) - 8) / 4.0 : u(gen);
    if (m > 1 && inst % 10 == 1) scores["w1"] = scores["w0"];  // tie
    auto lex = PolarityLexicon::from_scores(scores, {}, {}, {}, 1, {});
    const std::size_t bins = 1 + gen() % 12;
    auto spec = make_spec(lex, bins);
    auto fine = make_spec(lex, 2 * bins);

    std::vector<std::string> toks;
    std::vector<double> pols;
    const int len = inst % 50 == 0 ? 0 : static_cast<int>(gen() % 30);
    const bool all_oov = inst % 37 == 0;
    for (int i = 0; i < len; ++i) {
      const std::string t = all_oov ? "oov" + std::to_string(i) : "w" + std::to_string(gen() % (m + 4));
      toks.push_back(t);
      if (auto p = lex.polarity(t)) pols.push_back(*p);
    }
    const auto h = histogram(spec, lex, toks);
    const auto h2 = histogram(fine, lex, toks);

    double mass = 0.0;
    for (double x : h) mass += x;
    const bool zero = std::all_of(h.begin(), h.end(), [](double x) { return x == 0.0; });
    if (pols.empty() ? !zero : std::abs(mass - 1.0) > 1e-12) ++bad_mass;

    // Occurrence counts must equal an interval-scan oracle bin for bin.
    const double n = static_cast<double>(pols.size());
    auto want = oracle::histogram(pols, bins, spec.min_polarity, spec.max_polarity);
    double total = 0;
    for (std::size_t j = 0; j < bins; ++j) {
      const double got = std::round(h[j] * n);
      total += got;
      if (got != std::round(want[j] * n)) ++bad_membership;
    }
    if (total != n) ++bad_membership;

    // Refinement, unless a polarity sits on one of the new interior edges.
    bool on_new_edge = false;
    for (double p : pols)
      for (std::size_t j = 1; j < 2 * bins; j += 2) on_new_edge |= p == fine.edge(j);
    for (double p : pols)
      for (double e : spec.edges()) on_edges += p == e;
    if (on_new_edge) continue;
    ++refine_checked;
    for (std::size_t j = 0; j < bins; ++j) {
      const double merged = std::round(h2[2 * j] * n) + std::round(h2[2 * j + 1] * n);
      if (merged != std::round(h[j] * n) || std::abs(h2[2 * j] + h2[2 * j + 1] - h[j]) > 1e-15) {
        ++bad_refine;
        break;
      }
    }
  }
  const bool ok = bad_mass == 0 && bad_membership == 0 && bad_refine == 0;
  return {ok, fmt("1000 instances: mass failures %zu, membership failures %zu, "
                  "refinement failures %zu of %zu checked, %zu occurrences exactly on an edge",
                  bad_mass, bad_membership, bad_refine, refine_checked, on_edges)};
}

// 6. Network structure: even odds at zero, prediction rule, causality.
Outcome network_fidelity() {
  std::mt19937_64 gen(606);
  std::uniform_real_distribution<double> u(-1, 1);
  std::size_t failures = 0, predictions = 0, perturbations = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t steps = 2 + gen() % 10;
    auto rand_inst = gradcheck::random_instance(gen(), steps, RnnDims{4, 3, 5, 3});

    auto zero = RnnParams::zeros(rand_inst.params.dims);
    for (const auto& s : forward(zero, rand_inst.rets, rand_inst.hists).steps)
      failures += !(s.probs[0] == 0.5 && s.probs[1] == 0.5);
    const auto zp = predict(zero, rand_inst.rets, rand_inst.hists);
    failures += !(zp.label == 0 && zp.up_probability == 0.5);

    const auto& p = rand_inst.params;
    const auto base = forward(p, rand_inst.rets, rand_inst.hists);
    const auto y = base.steps.back().probs;
    const auto pr = predict(p, rand_inst.rets, rand_inst.hists);
    failures += !(pr.label == (y[1] > y[0] ? 1 : 0) && pr.up_probability == y[1]);
    ++predictions;

    const std::size_t j = 1 + gen() % (steps - 1);
    auto rets = rand_inst.rets;
    auto hists = rand_inst.hists;
    for (std::size_t k = j; k < steps; ++k) {
      rets[k] += u(gen);
      for (auto& x : hists[k]) x = std::abs(u(gen));
    }
    const auto pert = forward(p, rets, hists);
    for (std::size_t i = 0; i < j; ++i) {
      failures += !(pert.steps[i].probs == base.steps[i].probs &&
                    pert.steps[i].news_hidden == base.steps[i].news_hidden);
    }
    ++perturbations;
  }
  // Exact tie and a clear up case for the decision rule.
  const auto tie = predict_from_probs({0.5, 0.5});
  const auto up = predict_from_probs({0.3, 0.7});
  failures += !(tie.label == 0 && tie.up_probability == 0.5);
  failures += !(up.label == 1 && up.up_probability == 0.7);
  return {failures == 0, fmt("%zu prediction checks, %zu future perturbations, %zu mismatches",
                             predictions, perturbations, failures)};
}

// 7. Two CLI runs with the same config are byte-identical.
Outcome determinism(const fs::path& work, const std::string& cli) {
  const auto dir = work / "determinism";
  fs::remove_all(dir);
  SynthParams sp;
  sp.stocks = 5;
  sp.days = 300;
  sp.impact_days = 3;
  write_synth(dir / "data", synthesize(sp));
  {
    std::ofstream cfg(dir / "exp.cfg");
    cfg << "prices = data/prices.csv\nnews = data/news.jsonl\nseeds = data/seeds.txt\n"
           "out = out\nlexicon.k = 5\ntrain.epochs = 20\n";
  }
  const std::string cmd = "\"" + cli + "\" run --config \"" + (dir / "exp.cfg").string() + "\" > /dev/null";
  std::vector<fs::path> files = {"report.json", "report.txt"};
  for (int i = 1; i <= 5; ++i) files.push_back(fs::path("models") / fmt("SYN%03d.ckpt", i));

  if (std::system(cmd.c_str()) != 0) return {false, "first run failed"};
  std::vector<std::string> first;
  for (const auto& f : files) first.push_back(slurp(dir / "out" / f));
  fs::remove_all(dir / "out");
  if (std::system(cmd.c_str()) != 0) return {false, "second run failed"};
  std::size_t same = 0;
  for (std::size_t i = 0; i < files.size(); ++i)
    same += !first[i].empty() && slurp(dir / "out" / files[i]) == first[i];
  return {same == files.size(), fmt("%zu/%zu output files byte-identical (reports + checkpoints)",
                                    same, files.size())};
}

// 8. Loss value at even odds and the exact penalty increment.
Outcome loss_sanity() {
  std::mt19937_64 gen(808);
  double worst_even = 0.0, worst_penalty = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t steps = 1 + gen() % 30;
    auto rand_inst = gradcheck::random_instance(gen(), steps, RnnDims{3, 2, 3, 3});
    auto zero = RnnParams::zeros(rand_inst.params.dims);
    const auto tz = forward(zero, rand_inst.rets, rand_inst.hists);
    const double even = loss(zero, tz, rand_inst.labels, {0.0, false});
    worst_even = std::max(worst_even, std::abs(even - static_cast<double>(steps) * std::log(2.0)));

    const auto& p = rand_inst.params;
    const auto tr = forward(p, rand_inst.rets, rand_inst.hists);
    const double lambda = std::uniform_real_distribution<double>(0.001, 2.0)(gen);
    double norm = 0.0;
    auto ts = p.tensors();
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (!RnnParams::is_bias(i))
        for (double w : ts[i]->data) norm += w * w;
    const double diff = loss(p, tr, rand_inst.labels, {lambda, false}) - loss(p, tr, rand_inst.labels, {0.0, false});
    worst_penalty = std::max(worst_penalty, rel_err(diff, lambda * norm));
  }
  return {worst_even <= 1e-12 && worst_penalty <= 1e-12,
          fmt("|loss - T ln2| max %.3g (<= 1e-12); penalty increment relative error max %.3g (<= 1e-12)",
              worst_even, worst_penalty)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <work-dir> <newsrnn-cli>\n", argv[0]);
    return 2;
  }
  const fs::path work = argv[1];
  const std::string cli = argv[2];
  fs::create_directories(work);

  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"method ordering on planted-signal market", 300, [&] { return method_ordering(work); }},
      {"gradient vs finite differences", 10, gradient_oracle},
      {"standard-set optimality", 10, lexicon_optimality},
      {"PMI / polarity vs naive recount", 5, pmi_equivalence},
      {"histogram properties", 5, histogram_properties},
      {"network structure and causality", 60, network_fidelity},
      {"run determinism", 300, [&] { return determinism(work, cli); }},
      {"loss sanity", 5, loss_sanity},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > criteria[i].budget_s) {
      o.pass = false;
      o.detail += fmt(" [over time budget %.0fs]", criteria[i].budget_s);
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s -- %s (%.2fs)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%s: %zu/%zu criteria passed\n", failed ? "FAIL" : "PASS", criteria.size() - failed,
              criteria.size());
  return failed ? 1 : 0;
}
