#pragma once

#include <stdexcept>
#include <string>

namespace cpres {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// simcore
struct PastTime : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// netsim
struct Disconnected : Error { using Error::Error; };
struct BadInterfaceList : Error { using Error::Error; };
struct NotControllable : Error { using Error::Error; };
struct UnknownRouter : Error { using Error::Error; };
struct EpisodeFinished : Error { using Error::Error; };

// feedersim
struct SchemaError : Error { using Error::Error; };
struct NonRadialBase : Error { using Error::Error; };
struct NonRadialIsland : Error { using Error::Error; };

// cpenv
struct UnknownSwitch : Error { using Error::Error; };
struct UnknownZone : Error { using Error::Error; };
struct UnknownCommand : Error { using Error::Error; };

// experts
struct NoAlternatePath : Error { using Error::Error; };
struct Unrestorable : Error { using Error::Error; };

// learn
struct ShapeMismatch : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct RequiresLogProb : Error { using Error::Error; };

// harness
struct ConfigError : Error { using Error::Error; };
struct MixedEnvironments : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct CorruptFile : Error { using Error::Error; };

}  // namespace cpres
