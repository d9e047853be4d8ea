#pragma once

#include <stdexcept>
#include <string>

namespace bn6 {

/// Process exit codes shared by the library's error taxonomy and the CLI.
enum class ExitCode : int {
    ok = 0,
    criterion_failure = 1,
    missing_dependency = 2,
    assumption_violation = 3,
    solver_failure = 4,
};

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::solver_failure; }
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NoSolutionInRange : public Error {
public:
    using Error::Error;
};

class BracketFailure : public Error {
public:
    using Error::Error;
};

class ResolutionError : public Error {
public:
    using Error::Error;
};

class NodeCountMismatch : public Error {
public:
    NodeCountMismatch(const std::string& what, int nodes) : Error(what), nodes_(nodes) {}
    [[nodiscard]] int nodes() const noexcept { return nodes_; }

private:
    int nodes_;
};

class SignCertificationError : public Error {
public:
    using Error::Error;
};

class ScaleTooLarge : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class NotBlownUp : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

class SeedFailure : public Error {
public:
    using Error::Error;
};

/// Nondegeneracy fails: the linearization around u0 has a (numerically) zero eigenvalue.
class DegenerateLinearization : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::assumption_violation; }
};

/// The sign condition 2 v0(xi0) != 1 fails within the configured tolerance.
class AssumptionV00Violated : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::assumption_violation; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::criterion_failure; }
};

/// A pipeline stage was asked to run before the stage it depends on.
class MissingDependency : public Error {
public:
    MissingDependency(const std::string& stage, const std::string& what)
        : Error(what), stage_(stage) {}
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::missing_dependency; }

private:
    std::string stage_;
};

}  // namespace bn6
