#pragma once

#include <stdexcept>
#include <string>

namespace sdde {

// Invalid model or experiment configuration. `field` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Point evaluation outside the closed domain.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A history query reached below the stored coverage.
class HistoryUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A delay law produced a value outside [0, h].
class ContractViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite state or force encountered during integration.
class BlowUp : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure (Newton, fit) failed to produce an acceptable result.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sdde
