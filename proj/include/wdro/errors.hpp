#pragma once

#include <stdexcept>
#include <string>

namespace wdro {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameters are individually valid but jointly inadmissible
/// (e.g. the value function would be infinite).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed to reach its tolerance.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double achieved_tolerance)
        : Error(what), achieved_tolerance_(achieved_tolerance) {}

    double achieved_tolerance() const noexcept { return achieved_tolerance_; }

private:
    double achieved_tolerance_;
};

/// The smooth-pasting candidate is not an equilibrium and the caller did not
/// ask for the raw candidate.
class SpValidityError : public Error {
public:
    SpValidityError(const std::string& what, double margin)
        : Error(what), margin_(margin) {}

    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

/// Root bracket does not enclose a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

/// Malformed or missing configuration entry.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : Error(key + ": " + what), key_(key) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace wdro
