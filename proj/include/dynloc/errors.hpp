#pragma once

#include <stdexcept>
#include <string>

namespace dynloc {

/// Invalid or inconsistent run configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A propagation left its validity envelope: non-finite state, norm drift,
/// probability reaching the box edge (CLI exit code 2).
class NumericalAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dynloc
