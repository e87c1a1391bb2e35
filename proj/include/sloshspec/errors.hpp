// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SLOSHSPEC_ERRORS_HPP
#define SLOSHSPEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sloshspec {

/// Invalid user input. `field` names the offending parameter.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A computation could not reach its accuracy target.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const char* field, const std::string& what)
{
    if (!ok) throw ConfigError(field, what);
}

} // namespace sloshspec

#endif
