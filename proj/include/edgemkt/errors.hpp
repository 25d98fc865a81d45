#pragma once
/** Error categories shared by all modules. */

#include <stdexcept>
#include <string>

namespace edgemkt {

/** Invalid configuration: inverted ranges, bad counts, unknown names. */
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Malformed or insufficient external input (CSV traces, short series). */
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** A documented precondition of an operation was not met by the caller. */
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/** Throws ContractViolation with the message when the condition is false. */
inline void require(bool cond, const char* msg) {
  if (!cond) throw ContractViolation(msg);
}
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

}  // namespace edgemkt
