#pragma once

#include <stdexcept>
#include <string>

namespace cospricer {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model, market or range failed its construction-time validation.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NumericFallbackRequired : public Error {
public:
    using Error::Error;
};

class MissingCumulant : public Error {
public:
    using Error::Error;
};

/// Richardson disagreement or imaginary residue too large; use Monte Carlo.
class IllConditioned : public Error {
public:
    using Error::Error;
};

class VarianceBlowup : public Error {
public:
    using Error::Error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

class InvalidCumulant : public Error {
public:
    using Error::Error;
};

class SlowDecay : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class MgfDiverges : public Error {
public:
    using Error::Error;
};

class IntegralNotDecayed : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <class E>
inline void require(bool cond, const std::string& what) {
    if (!cond) throw E(what);
}

}  // namespace detail
}  // namespace cospricer
