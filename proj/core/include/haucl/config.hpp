#pragma once

#include <cstdint>
#include <string>

namespace haucl {

struct AblationFlags {
  bool no_speaker_embedding = false;  // "w/o SE"
  bool no_vhgae_paths = false;        // reconstruction off, convolve the initial graph
  bool no_contrastive = false;        // "w/o CL"
};

/// Full run configuration. Defaults follow the published MELD-style
/// hyperparameters: batch 12, lr 1e-4, lambda_g 0.5, lambda_cl 1, 15 epochs,
/// dropout 0.4, Gumbel temperature 0.1, one convolution layer.
struct RunConfig {
  std::size_t d = 96;
  std::size_t d_z = 96;
  std::size_t d_h = 96;
  std::size_t conv_layers = 1;

  double tau_gumbel = 0.1;
  double tau_cl = 0.5;
  double l2_lambda = 1e-5;
  double lambda_g = 0.5;
  double lambda_cl = 1.0;
  double dropout = 0.4;
  double lr = 1e-4;

  std::size_t batch_size = 12;
  std::size_t epochs = 15;
  std::uint64_t seed = 1;

  bool soft_incidence = false;  // feed presence probabilities downstream instead of binarizing

  AblationFlags ablation;

  std::string data_path;
  std::string checkpoint_in;
  std::string checkpoint_out;

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  /// Reads a JSON config file; unknown keys are rejected. Fields absent from
  /// the file keep their current values, so flag overrides compose.
  void merge_json_file(const std::string& path);
};

}  // namespace haucl
