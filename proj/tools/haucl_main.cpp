// Command-line front end: train / eval / gradcheck / synth.
//
// Exit codes: 0 success, 1 failed gradient check, 2 config error,
// 3 data error, 4 numerical divergence.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "haucl/commands.hpp"

namespace {

struct ConfigCli {
  std::string config_file;
};

// Every RunConfig field gets a flag; a JSON config file (--config) is applied
// first and flags override it.
void add_config_flags(CLI::App* cmd, haucl::RunConfig& cfg, ConfigCli& cli) {
  cmd->add_option("--config", cli.config_file, "JSON config file (flags override it)");
  cmd->add_option("--d", cfg.d, "embedding dimension");
  cmd->add_option("--d-z", cfg.d_z, "latent dimension");
  cmd->add_option("--d-h", cfg.d_h, "classifier hidden dimension");
  cmd->add_option("--conv-layers", cfg.conv_layers, "hypergraph convolution layers");
  cmd->add_option("--tau-gumbel", cfg.tau_gumbel, "Gumbel-Softmax temperature");
  cmd->add_option("--tau-cl", cfg.tau_cl, "contrastive temperature");
  cmd->add_option("--lambda", cfg.l2_lambda, "L2 regularization weight");
  cmd->add_option("--lambda-g", cfg.lambda_g, "reconstruction loss weight");
  cmd->add_option("--lambda-cl", cfg.lambda_cl, "contrastive loss weight");
  cmd->add_option("--dropout", cfg.dropout, "dropout rate");
  cmd->add_option("--lr", cfg.lr, "learning rate");
  cmd->add_option("--batch-size", cfg.batch_size, "dialogues per optimizer step");
  cmd->add_option("--epochs", cfg.epochs, "training epochs");
  cmd->add_option("--seed", cfg.seed, "root RNG seed");
  cmd->add_flag("--soft-incidence", cfg.soft_incidence,
                "feed presence probabilities downstream instead of binarizing");
  cmd->add_flag("--no-speaker-embedding", cfg.ablation.no_speaker_embedding,
                "ablation: drop the speaker embedding");
  cmd->add_flag("--no-vhgae", cfg.ablation.no_vhgae_paths,
                "ablation: convolve the initial hypergraph, no reconstruction");
  cmd->add_flag("--no-contrastive", cfg.ablation.no_contrastive,
                "ablation: drop the contrastive loss");
}

int finalize_config(const CLI::App* cmd, haucl::RunConfig& cfg, const ConfigCli& cli,
                    const haucl::RunConfig& defaults) {
  if (cli.config_file.empty()) return 0;
  // precedence: subcommand defaults, then the config file, then explicit flags
  haucl::RunConfig merged = defaults;
  try {
    merged.merge_json_file(cli.config_file);
  } catch (const haucl::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return haucl::kExitConfigError;
  }
  auto take_flag = [&](const std::string& flag, auto member) {
    if (cmd->count(flag) > 0) merged.*member = cfg.*member;
  };
  take_flag("--d", &haucl::RunConfig::d);
  take_flag("--d-z", &haucl::RunConfig::d_z);
  take_flag("--d-h", &haucl::RunConfig::d_h);
  take_flag("--conv-layers", &haucl::RunConfig::conv_layers);
  take_flag("--tau-gumbel", &haucl::RunConfig::tau_gumbel);
  take_flag("--tau-cl", &haucl::RunConfig::tau_cl);
  take_flag("--lambda", &haucl::RunConfig::l2_lambda);
  take_flag("--lambda-g", &haucl::RunConfig::lambda_g);
  take_flag("--lambda-cl", &haucl::RunConfig::lambda_cl);
  take_flag("--dropout", &haucl::RunConfig::dropout);
  take_flag("--lr", &haucl::RunConfig::lr);
  take_flag("--batch-size", &haucl::RunConfig::batch_size);
  take_flag("--epochs", &haucl::RunConfig::epochs);
  take_flag("--seed", &haucl::RunConfig::seed);
  if (cmd->count("--soft-incidence")) merged.soft_incidence = cfg.soft_incidence;
  if (cmd->count("--no-speaker-embedding"))
    merged.ablation.no_speaker_embedding = cfg.ablation.no_speaker_embedding;
  if (cmd->count("--no-vhgae")) merged.ablation.no_vhgae_paths = cfg.ablation.no_vhgae_paths;
  if (cmd->count("--no-contrastive"))
    merged.ablation.no_contrastive = cfg.ablation.no_contrastive;
  auto count_of = [&](const std::string& name) -> std::size_t {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt ? opt->count() : 0;
  };
  if (count_of("--data")) merged.data_path = cfg.data_path;
  if (count_of("--checkpoint")) merged.checkpoint_in = cfg.checkpoint_in;
  if (count_of("--out")) merged.checkpoint_out = cfg.checkpoint_out;
  cfg = merged;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HAUCL multimodal-fusion pipeline"};
  app.require_subcommand(1);

  haucl::RunConfig train_cfg, eval_cfg, grad_cfg;
  ConfigCli train_cli, eval_cli, grad_cli;

  CLI::App* train = app.add_subcommand("train", "train a model and write a checkpoint");
  add_config_flags(train, train_cfg, train_cli);
  train->add_option("--data", train_cfg.data_path, "dataset file")->required();
  train->add_option("--out", train_cfg.checkpoint_out, "checkpoint output path");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  add_config_flags(eval, eval_cfg, eval_cli);
  eval->add_option("--data", eval_cfg.data_path, "dataset file")->required();
  eval->add_option("--checkpoint", eval_cfg.checkpoint_in, "checkpoint to load")->required();

  CLI::App* grad = app.add_subcommand("gradcheck", "finite-difference gradient check");
  add_config_flags(grad, grad_cfg, grad_cli);
  grad_cfg.d = grad_cfg.d_z = grad_cfg.d_h = 8;

  haucl::SynthSpec synth_spec;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset file");
  synth->add_option("--out", synth_out, "output dataset path")->required();
  synth->add_option("--classes", synth_spec.classes, "number of emotion classes");
  synth->add_option("--speakers", synth_spec.speakers, "number of speakers");
  synth->add_option("--dialogues", synth_spec.num_dialogues, "number of dialogues");
  synth->add_option("--min-len", synth_spec.min_len, "minimum utterances per dialogue");
  synth->add_option("--max-len", synth_spec.max_len, "maximum utterances per dialogue");
  synth->add_option("--dim-t", synth_spec.dim_t, "textual feature dimension");
  synth->add_option("--dim-a", synth_spec.dim_a, "acoustic feature dimension");
  synth->add_option("--dim-v", synth_spec.dim_v, "visual feature dimension");
  synth->add_option("--rho", synth_spec.emotion_inertia, "emotion inertia in [0, 1]");
  synth->add_option("--seed", synth_spec.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : haucl::kExitConfigError;
  }

  haucl::RunConfig train_defaults, eval_defaults, grad_defaults;
  grad_defaults.d = grad_defaults.d_z = grad_defaults.d_h = 8;

  if (train->parsed()) {
    if (int rc = finalize_config(train, train_cfg, train_cli, train_defaults)) return rc;
    return haucl::run_train(train_cfg, std::cout, std::cerr);
  }
  if (eval->parsed()) {
    if (int rc = finalize_config(eval, eval_cfg, eval_cli, eval_defaults)) return rc;
    return haucl::run_eval(eval_cfg, std::cout, std::cerr);
  }
  if (grad->parsed()) {
    if (int rc = finalize_config(grad, grad_cfg, grad_cli, grad_defaults)) return rc;
    return haucl::run_gradcheck(grad_cfg, std::cout, std::cerr);
  }
  if (synth->parsed()) {
    return haucl::run_synth(synth_spec, synth_out, std::cout, std::cerr);
  }
  return haucl::kExitConfigError;
}
