#pragma once

#include <stdexcept>
#include <string>

namespace ndetect {

// Every library failure derives from Error so callers (the CLI in
// particular) can map domain failures and input failures separately.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
  public:
    using Error::Error;
};

class NotAProjector : public Error {
  public:
    using Error::Error;
};

class NonCommuting : public Error {
  public:
    using Error::Error;
};

class ZeroDenominator : public Error {
  public:
    using Error::Error;
};

class Gc3Violation : public Error {
  public:
    Gc3Violation(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

class ParameterRange : public Error {
  public:
    using Error::Error;
};

class DegenerateState : public Error {
  public:
    using Error::Error;
};

class EmptySubspace : public Error {
  public:
    EmptySubspace(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

class SolverFailure : public Error {
  public:
    SolverFailure(const std::string& what, double best_residual)
        : Error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

  private:
    double best_residual_;
};

class DegenerateScreen : public Error {
  public:
    using Error::Error;
};

/// Malformed input file. `field` names the offending JSON path.
class SchemaError : public Error {
  public:
    SchemaError(std::string field, const std::string& constraint)
        : Error(field + ": " + constraint), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

} // namespace ndetect
