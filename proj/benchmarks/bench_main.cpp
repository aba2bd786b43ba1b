#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "blinkword/decoder.hpp"
#include "blinkword/dictionary.hpp"
#include "blinkword/heuristic.hpp"
#include "blinkword/pattern.hpp"
#include "blinkword/tinynet.hpp"
#include "blinkword/train.hpp"

namespace bw = blinkword;

namespace {

const bw::LabeledSet& frames() {
  static const bw::LabeledSet set = bw::generate_synthetic(64, 3);
  return set;
}

void BM_ClassifyHeuristic(benchmark::State& state) {
  const bw::HeuristicModel model;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.classify(frames()[i++ % frames().size()].frame));
  }
}
BENCHMARK(BM_ClassifyHeuristic);

void BM_ClassifyTinyNet(benchmark::State& state) {
  const auto model = bw::TinyNet::random(static_cast<std::size_t>(state.range(0)), 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.classify(frames()[i++ % frames().size()].frame));
  }
}
BENCHMARK(BM_ClassifyTinyNet)->Arg(0)->Arg(16)->Arg(64);

void BM_Forward(benchmark::State& state) {
  const auto model = bw::TinyNet::random(16, 1);
  std::vector<double> x(bw::TinyNet::kInputDim);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& v : x) v = unit(rng);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x));
}
BENCHMARK(BM_Forward);

void BM_Normalize(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution bit(0.3);
  std::string s(static_cast<std::size_t>(state.range(0)), '0');
  for (auto& c : s) c = bit(rng) ? '1' : '0';
  for (auto _ : state) benchmark::DoNotOptimize(bw::normalize(s));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Normalize)->Arg(100)->Arg(10000);

void BM_DecoderStep(benchmark::State& state) {
  const std::string trace = std::string(40, 'C') + "OOCCOOOCCO" + std::string(10, 'O');
  bw::Decoder decoder({}, bw::Dictionary(bw::DictionaryMode::kWords));
  std::vector<bw::DecodeEvent> out;
  std::size_t i = 0;
  for (auto _ : state) {
    bw::StateEvent e;
    e.frame_index = i;
    e.timestamp_ms = bw::replay_timestamp_ms(i, 10);
    e.state = trace[i % trace.size()] == 'C' ? bw::EyeState::kClosed : bw::EyeState::kOpen;
    decoder.push(e, out);
    if (out.size() > 1024) out.clear();
    ++i;
  }
}
BENCHMARK(BM_DecoderStep);

void BM_LossAndGradient(benchmark::State& state) {
  const auto model = bw::TinyNet::random(16, 1);
  const std::span<const bw::LabeledFrame> batch(frames().data(), 16);
  std::vector<double> grad;
  for (auto _ : state) benchmark::DoNotOptimize(bw::loss_and_gradient(model, batch, &grad));
}
BENCHMARK(BM_LossAndGradient);

void BM_TrainEpoch(benchmark::State& state) {
  const auto set = bw::generate_synthetic(static_cast<std::size_t>(state.range(0)), 5);
  bw::TrainConfig config;
  config.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(bw::train(set, {}, config).report);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size()));
}
BENCHMARK(BM_TrainEpoch)->Arg(250)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
