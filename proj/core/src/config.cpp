#include "haucl/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "haucl/errors.hpp"

namespace haucl {

using nlohmann::json;

void RunConfig::validate() const {
  if (d == 0 || d_z == 0 || d_h == 0) throw ConfigError("d, d_z and d_h must be positive");
  if (conv_layers == 0) throw ConfigError("conv_layers must be positive");
  if (!(tau_gumbel > 0.0)) throw ConfigError("tau_gumbel must be positive");
  if (!(tau_cl > 0.0)) throw ConfigError("tau_cl must be positive");
  if (l2_lambda < 0.0) throw ConfigError("lambda (L2 weight) must be nonnegative");
  if (lambda_g < 0.0) throw ConfigError("lambda_g must be nonnegative");
  if (lambda_cl < 0.0) throw ConfigError("lambda_cl must be nonnegative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
}

void RunConfig::merge_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config parse failure in " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(path + ": config must be a JSON object");

  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "d") d = value.get<std::size_t>();
      else if (key == "d_z") d_z = value.get<std::size_t>();
      else if (key == "d_h") d_h = value.get<std::size_t>();
      else if (key == "conv_layers") conv_layers = value.get<std::size_t>();
      else if (key == "tau_gumbel") tau_gumbel = value.get<double>();
      else if (key == "tau_cl") tau_cl = value.get<double>();
      else if (key == "lambda") l2_lambda = value.get<double>();
      else if (key == "lambda_g") lambda_g = value.get<double>();
      else if (key == "lambda_cl") lambda_cl = value.get<double>();
      else if (key == "dropout") dropout = value.get<double>();
      else if (key == "lr") lr = value.get<double>();
      else if (key == "batch_size") batch_size = value.get<std::size_t>();
      else if (key == "epochs") epochs = value.get<std::size_t>();
      else if (key == "seed") seed = value.get<std::uint64_t>();
      else if (key == "soft_incidence") soft_incidence = value.get<bool>();
      else if (key == "no_speaker_embedding") ablation.no_speaker_embedding = value.get<bool>();
      else if (key == "no_vhgae_paths") ablation.no_vhgae_paths = value.get<bool>();
      else if (key == "no_contrastive") ablation.no_contrastive = value.get<bool>();
      else if (key == "data") data_path = value.get<std::string>();
      else if (key == "checkpoint_in") checkpoint_in = value.get<std::string>();
      else if (key == "checkpoint_out") checkpoint_out = value.get<std::string>();
      else throw ConfigError(path + ": unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": bad config value: " + e.what());
  }
}

}  // namespace haucl
