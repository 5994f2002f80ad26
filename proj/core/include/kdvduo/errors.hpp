#pragma once

#include <stdexcept>
#include <string>

namespace kdvduo {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidParams : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct GridTooCoarse : Error {
    using Error::Error;
};

/// The implicit step matrix could not be factorized.
struct SingularStep : Error {
    explicit SingularStep(int step, const std::string& what)
        : Error("singular step matrix at step " + std::to_string(step) + ": " + what), step(step) {}
    int step;
};

/// Solution norm exceeded the runaway threshold relative to the data.
struct Unstable : Error {
    explicit Unstable(int step, double norm)
        : Error("solution blow-up at step " + std::to_string(step) + ", norm " + std::to_string(norm)),
          step(step),
          norm(norm) {}
    int step;
    double norm;
};

/// An iteration failed to reach its tolerance; carries the final residual.
struct NoConvergence : Error {
    NoConvergence(const std::string& where, int iterations, double residual)
        : Error(where + ": no convergence after " + std::to_string(iterations) +
                " iterations, residual " + std::to_string(residual)),
          iterations(iterations),
          residual(residual) {}
    int iterations;
    double residual;
};

struct EmptySeries : Error {
    using Error::Error;
};

struct AllZeroIndex : Error {
    using Error::Error;
};

struct NonpositiveR : Error {
    using Error::Error;
};

struct RootsNotPopulated : Error {
    using Error::Error;
};

struct DegenerateSymbol : Error {
    using Error::Error;
};

struct DegenerateTransform : Error {
    using Error::Error;
};

struct MissingTrace : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace kdvduo
