#pragma once

#include <agmarl/diff.hpp>

#include <map>
#include <string>
#include <vector>

namespace agmarl {

// Binary weights container:
//   magic "AGMW", u32 format version, then per-tensor records of
//   u32 name length, name bytes, u32 rank, u64 dims[rank],
//   little-endian f64 payload (row-major). Records run to end of file.
constexpr std::uint32_t kWeightsVersion = 1;

struct WeightsError : std::runtime_error {
    enum class Kind { BadMagic, UnsupportedVersion, Truncated, BadShape, Io };
    WeightsError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

using TensorMap = std::map<std::string, Tensor>;

void save_weights(const std::string& path, const TensorMap& tensors);
TensorMap load_weights(const std::string& path);

/// JSON mirror of the container, for debugging; same tensors, nested as
/// {"version": 1, "tensors": {name: {"shape": [...], "data": [...]}}}.
void save_weights_json(const std::string& path, const TensorMap& tensors);

/// Collects every entry of the store into the map under its stored name.
void collect_tensors(const ParamStore& store, TensorMap& out);

/// Writes tensor values into matching store entries; every entry must be
/// present with an identical shape.
void restore_tensors(ParamStore& store, const TensorMap& tensors);

}  // namespace agmarl
