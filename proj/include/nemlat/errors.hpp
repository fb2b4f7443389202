#pragma once

#include <stdexcept>
#include <string>

namespace nemlat {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDirector : Error { using Error::Error; };
struct InvalidQTensor : Error { using Error::Error; };
struct InvalidSampling : Error { using Error::Error; };
struct DegenerateGrid : Error { using Error::Error; };
struct CoverageError : Error { using Error::Error; };
struct IncompatibleFields : Error { using Error::Error; };
struct InvalidScaling : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct DegenerateLoop : Error { using Error::Error; };
struct SingularSite : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct InternalConsistency : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// carries the smallest constraint residual reached
struct OptimizationFailure : Error {
    double best_residual;
    OptimizationFailure(const std::string& msg, double r) : Error(msg), best_residual(r) {}
};

struct Infeasible : Error {
    double best_residual;
    Infeasible(const std::string& msg, double r) : Error(msg), best_residual(r) {}
};

}  // namespace nemlat
