#include <benchmark/benchmark.h>

#include <random>

#include "memquote/kernels.hpp"
#include "memquote/predictor.hpp"

using namespace memquote;

namespace {

std::vector<TokenSequence> sequences(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TokenSequence> out(n);
  for (auto& s : out) {
    s.resize(3 + rng() % 20);
    for (auto& t : s) t = "t" + std::to_string(rng() % 5000);
  }
  return out;
}

const std::vector<std::string> kLines = {
    "Go now.", "Stay here.", "I know you.", "We ride tonight.", "Run. Hide.",
    "Who are you?", "It is cold out.", "Bring me the map.", "Do you see it?",
    "The door is open now.", "Hand it over.", "This is my ship.", "Nobody moves until dawn."};

struct Movies {
  std::vector<Script> scripts;
  std::vector<MemorableList> lists;
};

Movies movies(std::size_t count) {
  std::mt19937_64 rng(3);
  Movies m;
  for (std::size_t i = 0; i < count; ++i) {
    Script s{"mv" + std::to_string(i), {}};
    MemorableList l{s.movie_id, {}};
    for (std::size_t j = 0; j < 1500; ++j) {
      std::string text = kLines[rng() % kLines.size()];
      if (rng() % 3 == 0) text = "Line " + std::to_string(j) + " " + text;
      s.lines.push_back({j, std::string(1, static_cast<char>('A' + rng() % 5)), text});
      if (rng() % 40 == 0) l.entries.push_back(text);
    }
    m.scripts.push_back(std::move(s));
    m.lists.push_back(std::move(l));
  }
  return m;
}

void BM_score_serial(benchmark::State& state) {
  const auto lm = train_lm(sequences(20000, 1), 3);
  const auto probes = sequences(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::score_sequences_serial(lm, probes));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_score_parallel(benchmark::State& state) {
  const auto lm = train_lm(sequences(20000, 1), 3);
  const auto probes = sequences(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::score_sequences(lm, probes));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_pairs_serial(benchmark::State& state) {
  const auto m = movies(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::build_all_pairs_serial(m.scripts, m.lists, 0.2, {}));
  }
}

void BM_pairs_parallel(benchmark::State& state) {
  const auto m = movies(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::build_all_pairs(m.scripts, m.lists, 0.2, {}));
  }
}

TaggedQuote toy(std::mt19937_64& rng, std::size_t line, bool mem) {
  static const std::vector<std::pair<std::string, std::string>> words = {
      {"a", "DT"}, {"he", "PRP"}, {"walked", "VBD"}, {"walks", "VBZ"}, {"dog", "NN"},
      {"the", "DT"}, {"it", "PRP"}, {"see", "VBP"}, {"home", "NN"}, {"cat", "NN"}};
  std::string text;
  std::vector<std::string> tags;
  for (std::size_t i = 0, n = 3 + rng() % 8; i < n; ++i) {
    const auto& [w, t] = words[rng() % words.size()];
    text += (i ? " " : "") + w;
    tags.push_back(t);
  }
  return {make_quote("b", line, "A", text, mem), tags};
}

void BM_cross_validate(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::vector<TaggedQuote> corpus;
  for (std::size_t i = 0; i < 2000; ++i) corpus.push_back(toy(rng, i, false));
  const auto bank = train_bank(corpus);
  std::vector<TaggedPair> pairs;
  for (std::size_t i = 0; i < 2000; ++i) pairs.push_back({toy(rng, 2 * i, true), toy(rng, 2 * i + 1, false)});
  const auto data = present_pairs(pairs, 1);
  FeatureContext ctx;
  ctx.common = ctx.slogan = &bank;
  CvOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(cross_validate(data, FeatureSet::kAll3, ctx, opt));
}

}  // namespace

BENCHMARK(BM_score_serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_score_parallel)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_pairs_serial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pairs_parallel)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cross_validate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
