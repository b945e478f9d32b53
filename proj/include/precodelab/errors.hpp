#pragma once

#include <stdexcept>

namespace precodelab {

/// Configuration problem (bad JSON, invalid field values): CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem problem (unreadable, unwritable or corrupt data files): CLI
/// exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace precodelab
