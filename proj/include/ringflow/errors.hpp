#pragma once

#include <stdexcept>
#include <string>

namespace ringflow {

// Root of every error the library raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error { public: using Error::Error; };
class ZeroSeparation : public Error { public: using Error::Error; };
class NotAPoint : public Error { public: using Error::Error; };
class TooCoarse : public Error { public: using Error::Error; };
class OutOfDomain : public Error { public: using Error::Error; };
class EmptyLevel : public Error { public: using Error::Error; };
class SeedOutOfDomain : public Error { public: using Error::Error; };
class ContourTouchesBoundary : public Error { public: using Error::Error; };
class WrongFixture : public Error { public: using Error::Error; };
class GammaNotOnRidge : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class VersionMismatch : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

// Raised for non-finite data or an iteration that ran out of budget.
class NumericalError : public Error { public: using Error::Error; };

class NoConvergence : public NumericalError {
public:
    NoConvergence(const std::string& what, int sweeps, double residual)
        : NumericalError(what), sweeps_(sweeps), residual_(residual) {}
    int sweeps() const { return sweeps_; }
    double residual() const { return residual_; }

private:
    int sweeps_;
    double residual_;
};

}  // namespace ringflow
