#ifndef COREXTM_ERROR_HPP_
#define COREXTM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace corextm {

// Bad or inconsistent configuration (missing seed word, bad window, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable files, malformed persisted artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed result broke one of its own invariants.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace corextm

#endif  // COREXTM_ERROR_HPP_
