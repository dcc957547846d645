#pragma once

#include <stdexcept>
#include <string>

namespace cyclores {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violated a documented precondition (non-finite value, H0 <= 0, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The Doppler factor 1 - n v_z / c vanished: the particle rides the wave
/// phase front and the retarded-time description breaks down.
class CherenkovDegenerate : public Error {
public:
    using Error::Error;
};

/// No sign change of the resonance residual inside the search bracket.
class NoRoot : public Error {
public:
    NoRoot(const std::string& what, double residual_min, double residual_max)
        : Error(what), residual_min_(residual_min), residual_max_(residual_max) {}

    double residual_min() const noexcept { return residual_min_; }
    double residual_max() const noexcept { return residual_max_; }

private:
    double residual_min_;
    double residual_max_;
};

/// Adaptive integration gave up before reaching the requested tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : Error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// The drift state was requested before the pulse envelope switched off.
class EnvelopeNotClosed : public Error {
public:
    using Error::Error;
};

}  // namespace cyclores
