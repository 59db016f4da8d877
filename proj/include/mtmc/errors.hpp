#pragma once

#include <stdexcept>
#include <string>

namespace mtmc {

// Error taxonomy mirrored by the CLI exit codes:
//   config_error    -> 2 (usage / configuration)
//   data_error      -> 3 (malformed or invalid input data)
//   invariant_error -> 4 (internal invariant violation)

class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

class invariant_error : public std::logic_error {
 public:
  explicit invariant_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace mtmc
