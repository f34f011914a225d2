#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sflam {

/// Malformed or out-of-range configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on a function argument was violated.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A solver produced a non-finite intermediate. Carries the iterate history.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::vector<double> trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// Training diverged (loss became non-finite).
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int round)
        : std::runtime_error(what), round_(round) {}

    int round() const noexcept { return round_; }

private:
    int round_;
};

} // namespace sflam
