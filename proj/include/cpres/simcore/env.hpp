#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpres/simcore/rng.hpp"
#include "cpres/simcore/spaces.hpp"

namespace cpres {

/// One environment transition: observation after the step, scalar reward,
/// termination flag and free-form diagnostics. When done is set, the info
/// key "done_reason" distinguishes goal completion from the step cap.
struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;
  nlohmann::json info = nlohmann::json::object();
};

/// Environment contract shared by the rerouting, feeder reconfiguration and
/// combined MDPs. One instance is strictly single-threaded; run concurrent
/// rollouts on separate instances (clone()), each reset with its own seed.
class Env {
 public:
  virtual ~Env() = default;

  virtual const MdpSpec& spec() const = 0;

  /// Begins a new episode; all episode randomness derives from `seed`.
  virtual StepResult reset(std::uint64_t seed) = 0;

  /// Applies a flat encoded action and advances one control interval.
  virtual StepResult step(std::int64_t action) = 0;

  /// Stable short identifier, e.g. "netsim:n8".
  virtual std::string id() const = 0;

  /// Hash of the full environment configuration; used to guard dataset and
  /// report compatibility.
  virtual std::uint64_t env_hash() const = 0;

  virtual std::unique_ptr<Env> clone() const = 0;
};

}  // namespace cpres
