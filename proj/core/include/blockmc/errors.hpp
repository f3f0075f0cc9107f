#ifndef BLOCKMC_ERRORS_HPP
#define BLOCKMC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace blockmc {

// Bad command line or option combination; exit code 1.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

// Malformed or unreadable input data; exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace blockmc

#endif
