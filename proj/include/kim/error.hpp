#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kim {

// Domain error with a stable machine-readable kind ("PoleAtBase", "NotFlat", ...).
// The CLI maps any Error to exit code 1 and prints the kind.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace kim
