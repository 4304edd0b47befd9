#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "llmon/analyze.hpp"
#include "llmon/convert.hpp"
#include "llmon/datagen.hpp"
#include "llmon/generate.hpp"
#include "llmon/machine.hpp"
#include "llmon/mask.hpp"
#include "llmon/surface.hpp"

namespace {

using namespace llmon;

// Concatenated random documents, printed in both syntaxes.
struct Corpus {
  std::string surface;
  std::string machine;
};

Corpus make_corpus(std::size_t roots) {
  std::mt19937_64 rng(1);
  Document d;
  for (std::size_t i = 0; i < roots; ++i) {
    Document part = random_document(rng);
    for (Node& n : part.roots) d.roots.push_back(std::move(n));
  }
  return {print_surface(d), print_machine(d)};
}

void BM_ParseSurface(benchmark::State& state) {
  const Corpus c = make_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_surface(c.surface));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * c.surface.size()));
}
BENCHMARK(BM_ParseSurface)->Arg(10)->Arg(100)->Arg(1000);

void BM_ParseMachine(benchmark::State& state) {
  const Corpus c = make_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_machine(c.machine));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * c.machine.size()));
}
BENCHMARK(BM_ParseMachine)->Arg(10)->Arg(100)->Arg(1000);

void BM_Tokenize(benchmark::State& state) {
  const Corpus c = make_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(c.machine));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * c.machine.size()));
}
BENCHMARK(BM_Tokenize)->Arg(10)->Arg(100)->Arg(1000);

void BM_ComputeMask(benchmark::State& state) {
  std::vector<SftRecord> pool;
  for (int i = 0; i < 64; ++i) pool.push_back({"Instruction number " + std::to_string(i), "input " + std::to_string(i), "out"});
  const auto inst = make_distractor_instance(pool, static_cast<std::size_t>(state.range(0)), 3);
  const ParsedMachine parsed = parse_machine(print_machine(inst.document));
  const ExecBinding b = resolve_exec(parsed.document, build_catalog(parsed.document).catalog).bindings.at(0);
  for (auto _ : state) benchmark::DoNotOptimize(compute_mask(parsed, b, MaskPolicy{}));
}
BENCHMARK(BM_ComputeMask)->Arg(1)->Arg(8)->Arg(32);

void BM_JsonRoundTrip(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const std::string text = random_json(rng, 6, 50);
  for (auto _ : state) benchmark::DoNotOptimize(llmon_to_json(json_to_llmon(text)));
}
BENCHMARK(BM_JsonRoundTrip);

}  // namespace

BENCHMARK_MAIN();
