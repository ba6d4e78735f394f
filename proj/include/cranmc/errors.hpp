// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cranmc {

/// Argument outside the mathematical domain of an operation (d <= 0, f <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configuration value violates an invariant. `field()` names the offending key.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Which half of the offloading chain could not meet its deadline.
enum class InfeasibleSide { Cloud, Ran };

/// A deadline or rate floor cannot be met. `ue()` is the offending user (-1 if not attributable).
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(InfeasibleSide side, int ue, const std::string& what)
        : std::runtime_error(what), side_(side), ue_(ue) {}

    InfeasibleSide side() const noexcept { return side_; }
    int ue() const noexcept { return ue_; }

private:
    InfeasibleSide side_;
    int ue_;
};

}  // namespace cranmc
