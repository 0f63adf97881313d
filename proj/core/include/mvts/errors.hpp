#pragma once

#include <stdexcept>
#include <string>

namespace mvts {

// Base for every error the library throws deliberately.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class InvalidObservation : public Error {
public:
    using Error::Error;
};

class NoObservations : public Error {
public:
    using Error::Error;
};

// Raised when a policy is asked to decide before every arm has been initialized,
// or when its internal state stops satisfying the posterior invariants.
class PolicyStateError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mvts
