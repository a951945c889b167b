#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "cpres/errors.hpp"

namespace cpres {

/// Static MDP description: observation dimension, factored (MultiDiscrete)
/// action cardinalities, discount and episode cap. Transition and reward
/// semantics live in each environment's step().
struct MdpSpec {
  int obs_dim = 0;
  std::vector<int> action_dims;
  double gamma = 0.99;
  int max_steps = 1;

  std::int64_t num_actions() const {
    std::int64_t n = 1;
    for (int d : action_dims) n *= d;
    return n;
  }

  void validate() const {
    if (obs_dim < 1) throw Error("MdpSpec: obs_dim must be >= 1");
    if (gamma < 0.0 || gamma >= 1.0) throw Error("MdpSpec: gamma must be in [0,1)");
    if (max_steps < 1) throw Error("MdpSpec: max_steps must be >= 1");
    if (action_dims.empty()) throw Error("MdpSpec: action_dims empty");
    for (int d : action_dims)
      if (d < 1) throw Error("MdpSpec: action cardinalities must be >= 1");
  }
};

/// Flattens per-factor indices into a single integer; the first factor
/// varies fastest: index = a0 + a1*d0 + a2*d0*d1 + ...
inline std::int64_t encode_action(const std::vector<int>& idx,
                                  const std::vector<int>& dims) {
  if (idx.size() != dims.size())
    throw OutOfRange("encode_action: factor count mismatch");
  std::int64_t flat = 0;
  std::int64_t stride = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= dims[i])
      throw OutOfRange("encode_action: factor " + std::to_string(i) +
                       " index " + std::to_string(idx[i]) + " not in [0," +
                       std::to_string(dims[i]) + ")");
    flat += idx[i] * stride;
    stride *= dims[i];
  }
  return flat;
}

/// Inverse of encode_action.
inline std::vector<int> decode_action(std::int64_t index,
                                      const std::vector<int>& dims) {
  std::int64_t total = 1;
  for (int d : dims) total *= d;
  if (index < 0 || index >= total)
    throw OutOfRange("decode_action: index " + std::to_string(index) +
                     " not in [0," + std::to_string(total) + ")");
  std::vector<int> idx(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    idx[i] = static_cast<int>(index % dims[i]);
    index /= dims[i];
  }
  return idx;
}

}  // namespace cpres
