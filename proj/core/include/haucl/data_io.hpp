#pragma once

#include <cstdint>
#include <string>

#include "haucl/dataset.hpp"
#include "haucl/params.hpp"

namespace haucl {

/// Reads and fully validates a dataset file (JSON, schema in README).
/// Throws DataError with dialogue/utterance context on any violation.
Dataset load_dataset(const std::string& path);

void save_dataset(const Dataset& dataset, const std::string& path);

struct SynthSpec {
  int classes = 6;
  int speakers = 2;
  std::size_t num_dialogues = 20;
  std::size_t min_len = 8, max_len = 16;
  std::size_t dim_t = 12, dim_a = 8, dim_v = 6;
  double emotion_inertia = 0.7;  // probability of repeating the previous label
  std::uint64_t seed = 7;
};

/// Class-conditional Gaussian features (per-class means drawn once from
/// N(0, I), observation noise sigma 0.5) plus a per-speaker offset vector;
/// speakers alternate; the label sequence repeats with probability
/// `emotion_inertia`, otherwise resamples uniformly. Pure in (spec, seed).
Dataset generate_synthetic(const SynthSpec& spec);

/// Binary checkpoint: magic "HAUCLCKPT1", a little-endian u64 manifest
/// length, a JSON manifest of {name, shape, byte_offset} entries, then the
/// concatenated row-major little-endian f64 blob. Round trips bit-exactly.
void save_checkpoint(const ParamRegistry& params, const std::string& path);

/// Loads by name into an existing registry; every registry parameter must be
/// present with a matching shape. Throws DataError on unknown magic,
/// truncation, or shape mismatch.
void load_checkpoint(ParamRegistry& params, const std::string& path);

inline constexpr char kCheckpointMagic[] = "HAUCLCKPT1";  // 10 bytes on disk

}  // namespace haucl
