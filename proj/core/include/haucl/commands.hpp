#pragma once

#include <iosfwd>
#include <string>

#include "haucl/config.hpp"
#include "haucl/data_io.hpp"
#include "haucl/dataset.hpp"
#include "haucl/model.hpp"

namespace haucl {

/// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitGradcheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitDiverged = 4;

/// Trains on cfg.data_path, logging one "key=value" record per epoch
/// (epoch, loss, ce, lg, lcl, acc, wf1) and writing cfg.checkpoint_out when
/// set. Every emitted number is a pure function of (config, seed).
int run_train(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Deterministic evaluation of a checkpoint on a dataset: dropout off, zero
/// reparameterization noise, presence probabilities thresholded at 0.5
/// without Gumbel noise. Prints "acc=<x> wf1=<y>" with 4 decimals.
int run_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Central-difference check (h = 1e-4) of d(total loss)/d(theta) for every
/// parameter on a tiny frozen-noise model; requires d, d_z, d_h <= 8. The
/// soft-incidence path is used so the checked function is differentiable.
/// Prints the worst offender and returns 0 iff max relative error < 1e-3.
/// `corrupt_param` (test hook) perturbs one analytic gradient on purpose.
int run_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& err,
                  const std::string& corrupt_param = "");

/// Generates a synthetic dataset file and prints summary counts.
int run_synth(const SynthSpec& spec, const std::string& out_path, std::ostream& out,
              std::ostream& err);

struct EvalMetrics {
  double acc = 0.0;
  double wf1 = 0.0;
};

/// Pooled accuracy / weighted F1 of deterministic eval-mode predictions over
/// every utterance of `dataset`.
EvalMetrics evaluate_model(const HauclModel& model, const Dataset& dataset,
                           const RunConfig& cfg);

}  // namespace haucl
