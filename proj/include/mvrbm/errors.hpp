#ifndef MVRBM_ERRORS_HPP
#define MVRBM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mvrbm {

// Bad flags, bad config values, out-of-range settings. CLI exit code 1.
class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data: bad magic numbers, truncated
// payloads, checksum failures, unreadable files. CLI exit code 2.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Operand shapes that do not line up. Treated as a data error by the CLI.
class DimensionError : public DataError {
  public:
    explicit DimensionError(const std::string& what) : DataError(what) {}
};

// Training blew up: non-finite or unreasonably large parameters. CLI exit code 3.
class DivergenceError : public std::runtime_error {
  public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mvrbm

#endif
