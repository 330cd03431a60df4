#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ptesc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (e.g. t >= T for timescale maps).
class DomainError : public Error {
public:
    DomainError(const std::string& what, double offending)
        : Error(what), value_(offending) {}
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    double value_;
};

/// Plant or controller evaluation produced (or was given) a non-finite value.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::vector<double> point)
        : Error(what), point_(std::move(point)) {}
    [[nodiscard]] const std::vector<double>& point() const noexcept { return point_; }

private:
    std::vector<double> point_;
};

/// Nonlinear solve did not reach its residual tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double best_residual)
        : Error(what), best_residual_(best_residual) {}
    [[nodiscard]] double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// Adaptive step size collapsed below the configured floor.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& what, double t) : Error(what), t_(t) {}
    [[nodiscard]] double t() const noexcept { return t_; }

private:
    double t_;
};

/// Scenario file could not be parsed or failed validation. Positions are
/// zero-based and printed one-based.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = -1, int column = -1,
                const std::string& source = "")
        : Error(format(what, line, column, source)),
          detail_(what),
          line_(line),
          column_(column) {}
    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }
    /// Message without source and position.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    static std::string format(const std::string& what, int line, int column,
                              const std::string& source) {
        std::string out = source.empty() ? "" : source + ": ";
        if (line >= 0) {
            out += "line " + std::to_string(line + 1) + ", column " + std::to_string(column + 1) +
                   ": ";
        }
        return out + what;
    }
    std::string detail_;
    int line_;
    int column_;
};

}  // namespace ptesc
