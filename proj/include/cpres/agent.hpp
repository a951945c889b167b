#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpres/simcore/env.hpp"

namespace cpres {

/// Anything that can pick actions during rollouts: neural policies, the
/// scripted experts, or the uniform-random baseline. Experts may inspect
/// the live environment; neural policies only read the observation.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::int64_t act(const std::vector<double>& obs, Env& env,
                           RngStream& rng, bool greedy) = 0;

  virtual std::string name() const = 0;

  /// Called at episode boundaries so stateful agents (plan cursors) reset.
  virtual void begin_episode(Env&) {}
};

class RandomAgent : public Agent {
 public:
  std::int64_t act(const std::vector<double>&, Env& env, RngStream& rng,
                   bool) override {
    return static_cast<std::int64_t>(rng.uniform_int(env.spec().num_actions()));
  }
  std::string name() const override { return "random"; }
};

}  // namespace cpres
