#pragma once

#include <stdexcept>
#include <string>

namespace greenmimo {

/// Failure categories surfaced by the library.
enum class ErrorKind {
  SingularConfiguration,  ///< stream count or geometry outside the model's domain
  InfeasibleSer,          ///< target SER not reachable at the given constellation
  InfeasiblePower,        ///< per-stream power denominator nonpositive
  Infeasible,             ///< no finite total power supports the request
  DegenerateChannel,      ///< singular filter / zero SINR denominator
  Instability,            ///< queue arrival rate at or above service rate
  Structural,             ///< dimension mismatch or invalid argument combination
  Parse,                  ///< config parsing failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace greenmimo
