#include "haucl/data_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "haucl/rng.hpp"

namespace haucl {

using nlohmann::json;

std::size_t Dataset::total_utterances() const {
  std::size_t n = 0;
  for (const auto& d : dialogues) n += d.num_utterances;
  return n;
}

namespace {

std::vector<double> parse_feature_vector(const json& arr, std::size_t expected_dim,
                                         const char* modality, std::size_t dlg,
                                         std::size_t utt) {
  if (!arr.is_array() || arr.size() != expected_dim) {
    throw DataError("dialogue " + std::to_string(dlg) + ", utterance " + std::to_string(utt) +
                    ": '" + modality + "' vector has " + std::to_string(arr.size()) +
                    " entries, expected " + std::to_string(expected_dim));
  }
  std::vector<double> out;
  out.reserve(expected_dim);
  for (const auto& v : arr) {
    if (!v.is_number()) {
      throw DataError("dialogue " + std::to_string(dlg) + ", utterance " + std::to_string(utt) +
                      ": non-numeric entry in '" + modality + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("parse failure in " + path + ": " + e.what());
  }

  Dataset ds;
  try {
    ds.num_classes = doc.at("classes").get<int>();
    ds.num_speakers = doc.at("num_speakers").get<int>();
    const json& dims = doc.at("dims");
    ds.dim_t = dims.at("t").get<std::size_t>();
    ds.dim_a = dims.at("a").get<std::size_t>();
    ds.dim_v = dims.at("v").get<std::size_t>();
  } catch (const json::exception& e) {
    throw DataError("bad dataset header in " + path + ": " + e.what());
  }
  if (ds.num_classes < 1) throw DataError(path + ": 'classes' must be positive");
  if (ds.num_speakers < 1) throw DataError(path + ": 'num_speakers' must be positive");
  if (ds.dim_t == 0 || ds.dim_a == 0 || ds.dim_v == 0)
    throw DataError(path + ": feature dims must be positive");

  if (!doc.contains("dialogues") || !doc["dialogues"].is_array()) {
    throw DataError(path + ": missing 'dialogues' array");
  }
  std::size_t dlg_idx = 0;
  for (const json& jd : doc["dialogues"]) {
    if (!jd.contains("utterances") || !jd["utterances"].is_array() || jd["utterances"].empty()) {
      throw DataError("dialogue " + std::to_string(dlg_idx) + ": empty or missing 'utterances'");
    }
    DialogueFeatures dlg;
    dlg.dim_t = ds.dim_t;
    dlg.dim_a = ds.dim_a;
    dlg.dim_v = ds.dim_v;
    std::size_t utt_idx = 0;
    for (const json& ju : jd["utterances"]) {
      try {
        auto t = parse_feature_vector(ju.at("t"), ds.dim_t, "t", dlg_idx, utt_idx);
        auto a = parse_feature_vector(ju.at("a"), ds.dim_a, "a", dlg_idx, utt_idx);
        auto v = parse_feature_vector(ju.at("v"), ds.dim_v, "v", dlg_idx, utt_idx);
        dlg.text.insert(dlg.text.end(), t.begin(), t.end());
        dlg.acoustic.insert(dlg.acoustic.end(), a.begin(), a.end());
        dlg.visual.insert(dlg.visual.end(), v.begin(), v.end());
        int speaker = ju.at("speaker").get<int>();
        int label = ju.at("label").get<int>();
        if (speaker < 0 || speaker >= ds.num_speakers) {
          throw DataError("dialogue " + std::to_string(dlg_idx) + ", utterance " +
                          std::to_string(utt_idx) + ": speaker " + std::to_string(speaker) +
                          " out of range [0, " + std::to_string(ds.num_speakers) + ")");
        }
        if (label < 0 || label >= ds.num_classes) {
          throw DataError("dialogue " + std::to_string(dlg_idx) + ", utterance " +
                          std::to_string(utt_idx) + ": label " + std::to_string(label) +
                          " out of range [0, " + std::to_string(ds.num_classes) + ")");
        }
        dlg.speakers.push_back(speaker);
        dlg.labels.push_back(label);
      } catch (const json::exception& e) {
        throw DataError("dialogue " + std::to_string(dlg_idx) + ", utterance " +
                        std::to_string(utt_idx) + ": " + e.what());
      }
      ++utt_idx;
    }
    dlg.num_utterances = utt_idx;
    ds.dialogues.push_back(std::move(dlg));
    ++dlg_idx;
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  json doc;
  doc["classes"] = ds.num_classes;
  doc["num_speakers"] = ds.num_speakers;
  doc["dims"] = {{"t", ds.dim_t}, {"a", ds.dim_a}, {"v", ds.dim_v}};
  json dialogues = json::array();
  for (const auto& dlg : ds.dialogues) {
    json utterances = json::array();
    for (std::size_t i = 0; i < dlg.num_utterances; ++i) {
      json u;
      u["t"] = std::vector<double>(dlg.text.begin() + i * dlg.dim_t,
                                   dlg.text.begin() + (i + 1) * dlg.dim_t);
      u["a"] = std::vector<double>(dlg.acoustic.begin() + i * dlg.dim_a,
                                   dlg.acoustic.begin() + (i + 1) * dlg.dim_a);
      u["v"] = std::vector<double>(dlg.visual.begin() + i * dlg.dim_v,
                                   dlg.visual.begin() + (i + 1) * dlg.dim_v);
      u["speaker"] = dlg.speakers[i];
      u["label"] = dlg.labels[i];
      utterances.push_back(std::move(u));
    }
    dialogues.push_back(json{{"utterances", std::move(utterances)}});
  }
  doc["dialogues"] = std::move(dialogues);

  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << doc.dump(1, ' ') << '\n';
  if (!out) throw DataError("write failure: " + path);
}

Dataset generate_synthetic(const SynthSpec& spec) {
  if (spec.classes < 2) throw ValueError("generate_synthetic: need at least 2 classes");
  if (spec.speakers < 2) throw ValueError("generate_synthetic: need at least 2 speakers");
  if (spec.num_dialogues == 0) throw ValueError("generate_synthetic: need at least 1 dialogue");
  if (spec.min_len == 0 || spec.min_len > spec.max_len) {
    throw ValueError("generate_synthetic: bad length range");
  }
  if (!(spec.emotion_inertia >= 0.0 && spec.emotion_inertia <= 1.0)) {
    throw ValueError("generate_synthetic: emotion_inertia must be in [0, 1]");
  }

  constexpr double kObsNoise = 0.5;
  constexpr double kSpeakerOffset = 1.0;

  RngStream means_rng = RngStream::for_purpose(spec.seed, "synth-class-means");
  RngStream offsets_rng = RngStream::for_purpose(spec.seed, "synth-speaker-offsets");
  RngStream chain_rng = RngStream::for_purpose(spec.seed, "synth-labels");
  RngStream noise_rng = RngStream::for_purpose(spec.seed, "synth-noise");

  const std::size_t dims[3] = {spec.dim_t, spec.dim_a, spec.dim_v};
  auto c = static_cast<std::size_t>(spec.classes);
  auto s = static_cast<std::size_t>(spec.speakers);

  // per-modality class means and speaker offsets
  std::vector<std::vector<double>> class_means(3), speaker_offsets(3);
  for (std::size_t m = 0; m < 3; ++m) {
    class_means[m].resize(c * dims[m]);
    for (double& v : class_means[m]) v = means_rng.normal();
    speaker_offsets[m].resize(s * dims[m]);
    for (double& v : speaker_offsets[m]) v = kSpeakerOffset * offsets_rng.normal();
  }

  Dataset ds;
  ds.num_classes = spec.classes;
  ds.num_speakers = spec.speakers;
  ds.dim_t = spec.dim_t;
  ds.dim_a = spec.dim_a;
  ds.dim_v = spec.dim_v;

  for (std::size_t d = 0; d < spec.num_dialogues; ++d) {
    std::size_t len = spec.min_len +
                      chain_rng.next_u64() % (spec.max_len - spec.min_len + 1);
    DialogueFeatures dlg;
    dlg.num_utterances = len;
    dlg.dim_t = spec.dim_t;
    dlg.dim_a = spec.dim_a;
    dlg.dim_v = spec.dim_v;

    int label = static_cast<int>(chain_rng.next_u64() % c);
    for (std::size_t i = 0; i < len; ++i) {
      if (i > 0 && chain_rng.uniform01() >= spec.emotion_inertia) {
        label = static_cast<int>(chain_rng.next_u64() % c);
      }
      int speaker = static_cast<int>(i % s);
      dlg.labels.push_back(label);
      dlg.speakers.push_back(speaker);

      std::vector<double>* blocks[3] = {&dlg.text, &dlg.acoustic, &dlg.visual};
      for (std::size_t m = 0; m < 3; ++m) {
        const double* mean = class_means[m].data() + static_cast<std::size_t>(label) * dims[m];
        const double* off = speaker_offsets[m].data() + static_cast<std::size_t>(speaker) * dims[m];
        for (std::size_t k = 0; k < dims[m]; ++k) {
          blocks[m]->push_back(mean[k] + off[k] + kObsNoise * noise_rng.normal());
        }
      }
    }
    ds.dialogues.push_back(std::move(dlg));
  }
  return ds;
}

// ---- checkpoint ------------------------------------------------------------

namespace {

constexpr std::size_t kMagicLen = 10;

void put_u64_le(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const ParamRegistry& params, const std::string& path) {
  json manifest = json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : params.items()) {
    manifest.push_back({{"name", name}, {"shape", t.shape()}, {"byte_offset", offset}});
    offset += t.numel() * sizeof(double);
  }
  std::string manifest_str = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open checkpoint for writing: " + path);
  out.write(kCheckpointMagic, kMagicLen);
  put_u64_le(out, manifest_str.size());
  out.write(manifest_str.data(), static_cast<std::streamsize>(manifest_str.size()));
  for (const auto& [name, t] : params.items()) {
    for (double v : t.values()) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw DataError("write failure: " + path);
}

void load_checkpoint(ParamRegistry& params, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);

  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, kCheckpointMagic, kMagicLen) != 0) {
    throw DataError(path + ": unknown checkpoint magic (version mismatch?)");
  }
  std::uint64_t manifest_len = get_u64_le(in);
  if (!in) throw DataError(path + ": truncated manifest header");
  std::string manifest_str(manifest_len, '\0');
  in.read(manifest_str.data(), static_cast<std::streamsize>(manifest_len));
  if (!in) throw DataError(path + ": truncated manifest");

  json manifest;
  try {
    manifest = json::parse(manifest_str);
  } catch (const json::exception& e) {
    throw DataError(path + ": corrupt manifest: " + e.what());
  }
  if (!manifest.is_array()) throw DataError(path + ": manifest is not a list");

  std::streampos blob_start = in.tellg();
  in.seekg(0, std::ios::end);
  std::uint64_t blob_size = static_cast<std::uint64_t>(in.tellg() - blob_start);

  struct Entry {
    Shape shape;
    std::uint64_t offset;
  };
  std::unordered_map<std::string, Entry> index;
  for (const json& e : manifest) {
    try {
      index[e.at("name").get<std::string>()] = {e.at("shape").get<Shape>(),
                                                e.at("byte_offset").get<std::uint64_t>()};
    } catch (const json::exception& ex) {
      throw DataError(path + ": bad manifest entry: " + ex.what());
    }
  }

  for (const auto& [name, handle] : params.items()) {
    Tensor t = handle;  // shared storage
    auto it = index.find(name);
    if (it == index.end()) throw DataError(path + ": checkpoint missing parameter " + name);
    if (it->second.shape != t.shape()) {
      throw DataError(path + ": parameter " + name + " has shape " +
                      shape_str(it->second.shape) + ", model expects " + shape_str(t.shape()));
    }
    std::uint64_t bytes = t.numel() * sizeof(double);
    if (it->second.offset + bytes > blob_size) {
      throw DataError(path + ": corrupt checkpoint, blob truncated for parameter " + name);
    }
    in.seekg(blob_start + static_cast<std::streamoff>(it->second.offset));
    for (double& v : t.mutable_values()) {
      v = std::bit_cast<double>(get_u64_le(in));
    }
    if (!in) throw DataError(path + ": read failure for parameter " + name);
  }
}

}  // namespace haucl
