// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Returns nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "haucl/commands.hpp"
#include "haucl/contrastive.hpp"
#include "haucl/data_io.hpp"
#include "haucl/hypergraph.hpp"
#include "haucl/metrics.hpp"
#include "haucl/model.hpp"
#include "haucl/vhgae.hpp"

using namespace haucl;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "haucl_acceptance";
  fs::create_directories(dir);
  return dir;
}

double parse_metric(const std::string& text, const std::string& key) {
  auto pos = text.rfind(key + "=");
  if (pos == std::string::npos) return -1.0;
  return std::stod(text.substr(pos + key.size() + 1));
}

double max_epoch_metric(const std::string& log, const std::string& key) {
  double best = -1.0;
  std::istringstream lines(log);
  std::string line;
  while (std::getline(lines, line)) {
    auto pos = line.find(key + "=");
    if (pos == std::string::npos) continue;
    best = std::max(best, std::stod(line.substr(pos + key.size() + 1)));
  }
  return best;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// ---- criteria -------------------------------------------------------------

void criterion_gradient_integrity() {
  RunConfig cfg;
  cfg.d = cfg.d_z = cfg.d_h = 8;
  cfg.seed = 1;
  auto start = std::chrono::steady_clock::now();
  std::ostringstream out, err;
  int rc = run_gradcheck(cfg, out, err);
  double elapsed = seconds_since(start);
  double worst = parse_metric(out.str(), "max_rel_err");
  char detail[160];
  std::snprintf(detail, sizeof(detail), "max_rel_err=%.3e (< 1e-3), runtime=%.1fs (< 60s)",
                worst, elapsed);
  report("gradient-integrity", rc == kExitOk && worst >= 0.0 && worst < 1e-3 && elapsed < 60.0,
         detail);
}

void criterion_learnability(const fs::path& dir) {
  SynthSpec spec;  // C=6, S=2, 20 dialogues, lengths 8..16, rho=0.7, seed=7
  fs::path data = dir / "learnability.json";
  Dataset ds = generate_synthetic(spec);
  save_dataset(ds, data.string());

  RunConfig cfg;  // defaults: lr=1e-4, batch=12, lambda_g=0.5, lambda_cl=1
  cfg.epochs = 200;
  cfg.seed = 7;
  cfg.data_path = data.string();

  auto start = std::chrono::steady_clock::now();
  std::ostringstream log, err;
  int rc = run_train(cfg, log, err);
  double elapsed = seconds_since(start);
  double best_acc = max_epoch_metric(log.str(), "acc");
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "best train acc=%.4f (>= 0.95) within 200 epochs, runtime=%.0fs (< 300s)",
                best_acc, elapsed);
  report("learnability", rc == kExitOk && best_acc >= 0.95 && elapsed < 300.0, detail);
}

void criterion_ablation_direction(const fs::path& dir) {
  SynthSpec spec;
  Dataset full_set = generate_synthetic(spec);

  Dataset train_set = full_set, eval_set = full_set;
  std::size_t eval_count = full_set.dialogues.size() / 5;  // held-out 20%
  train_set.dialogues.assign(full_set.dialogues.begin(),
                             full_set.dialogues.end() - static_cast<long>(eval_count));
  eval_set.dialogues.assign(full_set.dialogues.end() - static_cast<long>(eval_count),
                            full_set.dialogues.end());
  fs::path train_path = dir / "abl_train.json", eval_path = dir / "abl_eval.json";
  save_dataset(train_set, train_path.string());
  save_dataset(eval_set, eval_path.string());

  auto run_variant = [&](const AblationFlags& flags, std::uint64_t seed) -> double {
    RunConfig cfg;
    cfg.epochs = 150;
    cfg.seed = seed;
    cfg.data_path = train_path.string();
    cfg.ablation = flags;
    fs::path ck = dir / ("abl_" + std::to_string(seed) + ".ckpt");
    cfg.checkpoint_out = ck.string();
    std::ostringstream log, err;
    if (run_train(cfg, log, err) != kExitOk) return -1.0;

    RunConfig ecfg = cfg;
    ecfg.data_path = eval_path.string();
    ecfg.checkpoint_in = ck.string();
    std::ostringstream out, err2;
    if (run_eval(ecfg, out, err2) != kExitOk) return -1.0;
    return parse_metric(out.str(), "acc");
  };

  AblationFlags full{}, no_se{}, no_gcl{}, no_cl{};
  no_se.no_speaker_embedding = true;
  no_gcl.no_vhgae_paths = true;  // reconstruction and contrast both removed
  no_gcl.no_contrastive = true;
  no_cl.no_contrastive = true;

  double acc_full = 0, acc_se = 0, acc_gcl = 0, acc_cl = 0;
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  for (std::uint64_t s : seeds) {
    acc_full += run_variant(full, s);
    acc_se += run_variant(no_se, s);
    acc_gcl += run_variant(no_gcl, s);
    acc_cl += run_variant(no_cl, s);
  }
  double n = static_cast<double>(seeds.size());
  acc_full /= n;
  acc_se /= n;
  acc_gcl /= n;
  acc_cl /= n;

  bool pass = acc_full >= acc_se - 0.02 && acc_full >= acc_gcl - 0.02 && acc_full >= acc_cl - 0.02;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "mean eval acc over 3 seeds: full=%.4f, w/o SE=%.4f, w/o GCL=%.4f, w/o CL=%.4f "
                "(full >= each - 0.02)",
                acc_full, acc_se, acc_gcl, acc_cl);
  report("ablation-direction", pass, detail);
}

void criterion_gumbel_marginal() {
  // 10,000 hard decodes per score; a second always-on edge keeps the row
  // non-empty so the isolated-node repair never touches the measured entry
  RngStream rng(99);
  bool pass = true;
  char detail[160];
  std::string all;
  for (double s : {-2.0, 0.0, 2.0}) {
    Tensor m_nodes = Tensor::from({1, 2}, {s, 1.0});
    Tensor m_edges = Tensor::from({2, 2}, {1.0, 0.0, 0.0, 100.0});  // scores [s, 100]
    std::size_t on = 0;
    const std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
      std::vector<double> diff = {rng.gumbel() - rng.gumbel(), rng.gumbel() - rng.gumbel()};
      DecodeResult out = decode_incidence(m_nodes, m_edges, 1.0, Tensor::from({1, 2}, diff), true);
      on += out.incidence.at(0, 0) == 1.0 ? 1 : 0;
    }
    double freq = static_cast<double>(on) / static_cast<double>(trials);
    double want = 1.0 / (1.0 + std::exp(-s));
    pass = pass && std::fabs(freq - want) <= 0.02;
    std::snprintf(detail, sizeof(detail), "s=%+.0f: freq=%.4f vs sigmoid=%.4f; ", s, freq, want);
    all += detail;
  }
  report("gumbel-softmax-marginal", pass, all + "(all within 0.02)");
}

void criterion_vhgae_loss_oracles() {
  LatentStats prior{Tensor::zeros({5, 4}), Tensor::full({5, 4}, 1.0)};
  double kl_at_prior = std::fabs(gaussian_kl(prior).item());

  bool kl_nonneg = true;
  RngStream rng(7);
  for (int i = 0; i < 1000; ++i) {
    LatentStats stats{Tensor::uniform({2, 3}, -3.0, 3.0, rng),
                      Tensor::uniform({2, 3}, 0.05, 4.0, rng)};
    kl_nonneg = kl_nonneg && gaussian_kl(stats).item() >= 0.0;
  }

  Tensor h = Tensor::from({2, 3}, {1, 0, 1, 0, 1, 0});
  double bce_exact = incidence_bce(h, h).item();

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "KL(prior)=%.2e (< 1e-12), KL >= 0 on 1000 random latents: %s, exact BCE=%.2e "
                "(<= 1e-6)",
                kl_at_prior, kl_nonneg ? "yes" : "no", bce_exact);
  report("vhgae-loss-oracles", kl_at_prior < 1e-12 && kl_nonneg && bce_exact <= 1e-6, detail);
}

void criterion_structure() {
  bool pass = true;
  for (std::size_t n = 1; n <= 50; ++n) {
    Hypergraph g = build_initial_incidence(n);
    pass = pass && g.num_edges() == n + 3;
    Degrees deg = degrees(g.incidence);
    for (double d : deg.node) pass = pass && d == 2.0;
    for (double v : g.incidence.values()) pass = pass && (v == 0.0 || v == 1.0);
  }
  report("structure", pass, "N=1..50: M == N+3, every node degree 2, binary entries");
}

void criterion_contrastive_oracle() {
  Tensor v = Tensor::from({2, 2}, {1, 0, 0, 1});
  double closed = std::log((std::exp(1.0) + 2.0) / std::exp(1.0));
  double got = contrastive_loss(v, v, 1.0).item();
  double closed_err = std::fabs(got - closed);

  // random cases against the scalar double-loop
  RngStream rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::size_t n = 3 + static_cast<std::size_t>(trial);
    std::vector<std::vector<double>> r1(n, std::vector<double>(4)), r2(n, std::vector<double>(4));
    std::vector<double> f1, f2;
    for (auto& r : r1)
      for (double& x : r) x = rng.uniform(-2, 2);
    for (auto& r : r2)
      for (double& x : r) x = rng.uniform(-2, 2);
    for (auto& r : r1) f1.insert(f1.end(), r.begin(), r.end());
    for (auto& r : r2) f2.insert(f2.end(), r.begin(), r.end());

    double tau = 0.5;
    auto q = [&](const std::vector<double>& a, const std::vector<double>& b) {
      return std::exp(cosine_similarity(a, b) / tau);
    };
    double oracle = 0.0;
    auto f = [&](const std::vector<std::vector<double>>& a,
                 const std::vector<std::vector<double>>& b, std::size_t i) {
      double denom = q(a[i], b[i]);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        denom += q(a[i], b[j]) + q(a[i], a[j]);
      }
      return -std::log(q(a[i], b[i]) / denom);
    };
    for (std::size_t i = 0; i < n; ++i) oracle += f(r1, r2, i) + f(r2, r1, i);
    oracle /= 2.0 * static_cast<double>(n);
    double lib =
        contrastive_loss(Tensor::from({n, 4}, f1), Tensor::from({n, 4}, f2), tau).item();
    worst = std::max(worst, std::fabs(lib - oracle));
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "closed-form |err|=%.2e (< 1e-9), brute-force worst |err|=%.2e (< 1e-9)",
                closed_err, worst);
  report("contrastive-oracle", closed_err < 1e-9 && worst < 1e-9, detail);
}

void criterion_metrics_oracle() {
  double fixture = weighted_f1({0, 1, 1, 1}, {0, 0, 1, 1}, 2);
  double want = (2.0 * (2.0 / 3.0) + 2.0 * 0.8) / 4.0;
  double err = std::fabs(fixture - want);
  bool perfect = accuracy({0, 1, 2}, {0, 1, 2}) == 1.0 && weighted_f1({0, 1, 2}, {0, 1, 2}, 3) == 1.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail), "WF1 fixture err=%.2e (< 1e-9, value %.6f), perfect=%s",
                err, fixture, perfect ? "Acc=WF1=1" : "broken");
  report("metrics-oracle", err < 1e-9 && perfect, detail);
}

void criterion_determinism(const fs::path& dir) {
  SynthSpec spec;
  fs::path data = dir / "determinism.json";
  save_dataset(generate_synthetic(spec), data.string());

  RunConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 11;
  cfg.data_path = data.string();
  fs::path ck1 = dir / "det1.ckpt", ck2 = dir / "det2.ckpt";

  std::ostringstream log1, log2, err;
  cfg.checkpoint_out = ck1.string();
  int rc1 = run_train(cfg, log1, err);
  cfg.checkpoint_out = ck2.string();
  int rc2 = run_train(cfg, log2, err);

  bool logs_equal = rc1 == kExitOk && rc2 == kExitOk && log1.str() == log2.str();
  bool ckpt_equal = read_bytes(ck1) == read_bytes(ck2) && !read_bytes(ck1).empty();

  // round trip: load then save again, bitwise identical
  Dataset ds = load_dataset(data.string());
  RngStream init = RngStream::for_purpose(123, "init");
  HauclModel model(dims_from(cfg, ds), init);
  load_checkpoint(model.params(), ck1.string());
  fs::path ck3 = dir / "det3.ckpt";
  save_checkpoint(model.params(), ck3.string());
  bool roundtrip_equal = read_bytes(ck1) == read_bytes(ck3);

  char detail[160];
  std::snprintf(detail, sizeof(detail), "epoch logs identical=%s, checkpoint round trip bit-exact=%s",
                logs_equal ? "yes" : "no", (ckpt_equal && roundtrip_equal) ? "yes" : "no");
  report("determinism", logs_equal && ckpt_equal && roundtrip_equal, detail);
}

void criterion_non_reproduction() {
  // real-dataset scores (e.g. 70.30 Acc / 70.27 WF1) need the original
  // corpora and pretrained feature extractors; this artifact substitutes the
  // property suite above on synthetic data by design.
  report("non-reproduction-note", true,
         "published benchmark scores are out of scope at desk scale; the property "
         "suite above is the acceptance substitute");
}

}  // namespace

int main() {
  fs::path dir = work_dir();

  criterion_structure();
  criterion_metrics_oracle();
  criterion_contrastive_oracle();
  criterion_vhgae_loss_oracles();
  criterion_gumbel_marginal();
  criterion_gradient_integrity();
  criterion_determinism(dir);
  criterion_learnability(dir);
  criterion_ablation_direction(dir);
  criterion_non_reproduction();

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
