#include <benchmark/benchmark.h>

#include "haucl/adam.hpp"
#include "haucl/commands.hpp"
#include "haucl/data_io.hpp"
#include "haucl/hyperconv.hpp"
#include "haucl/model.hpp"

using namespace haucl;

namespace {

Dataset bench_dataset(std::size_t utterances) {
  SynthSpec spec;
  spec.num_dialogues = 1;
  spec.min_len = utterances;
  spec.max_len = utterances;
  spec.seed = 123;
  return generate_synthetic(spec);
}

RunConfig bench_config() {
  RunConfig cfg;
  cfg.seed = 123;
  return cfg;
}

}  // namespace

static void BM_HypergraphConvForward(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  ParamRegistry reg;
  RngStream init(1);
  ConvParams p = make_conv_params(reg, "conv", 64, init);
  Hypergraph g = build_initial_incidence(n);
  RngStream rng(2);
  Tensor x = Tensor::uniform({3 * n, 64}, -1.0, 1.0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hypergraph_conv(x, g.incidence, p).nodes.values().data());
  }
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_HypergraphConvForward)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Complexity();

static void BM_DialogueForward(benchmark::State& state) {
  Dataset ds = bench_dataset(static_cast<std::size_t>(state.range(0)));
  RunConfig cfg = bench_config();
  RngStream init = RngStream::for_purpose(cfg.seed, "init");
  HauclModel model(dims_from(cfg, ds), init);
  HauclModel::ForwardOptions opts;
  opts.train = false;
  HauclModel::Noise noise = model.zero_noise(ds.dialogues[0].num_utterances, opts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(ds.dialogues[0], opts, noise).probs.values().data());
  }
}
BENCHMARK(BM_DialogueForward)->Arg(8)->Arg(16)->Arg(32);

static void BM_TrainStep(benchmark::State& state) {
  Dataset ds = bench_dataset(12);
  RunConfig cfg = bench_config();
  RngStream init = RngStream::for_purpose(cfg.seed, "init");
  HauclModel model(dims_from(cfg, ds), init);
  RngStream dr(3), de(4), gu(5);
  HauclModel::ForwardOptions opts;
  opts.train = true;
  opts.dropout_p = cfg.dropout;
  Adam adam(cfg.lr);
  const DialogueFeatures& dlg = ds.dialogues[0];
  for (auto _ : state) {
    HauclModel::Noise noise = model.draw_noise(dlg.num_utterances, opts, dr, de, gu);
    Tape tape;
    Tape::Scope scope(tape);
    HauclModel::Output out = model.forward(dlg, opts, noise);
    Tensor ce = scale(out.nll_sum, 1.0 / static_cast<double>(out.num_utterances));
    LossWeights w{cfg.lambda_g, cfg.lambda_cl, 0.0};
    Tensor loss = total_loss(ce, out.loss_g_view1, out.loss_g_view2, out.loss_cl, w);
    tape.backward(loss);
    adam.step(model.params());
    model.params().zero_grads();
    benchmark::DoNotOptimize(loss.item());
  }
}
BENCHMARK(BM_TrainStep);

BENCHMARK_MAIN();
