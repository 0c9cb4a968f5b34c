#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace retail {

/// Precondition violated by the caller (lengths, orders, horizons).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but carries no usable information (e.g. zero variance).
class DegenerateInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Value outside the mathematical domain of the operation (e.g. log of a non-positive value).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed input file. Carries the 1-based line number of the offending record.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Well-formed data that violates a cross-table invariant (join keys, negative sales).
class DataIntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative optimizer hit its iteration cap. The best parameters seen are kept.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> best_iterate, double best_objective)
        : std::runtime_error(what), best_(std::move(best_iterate)), objective_(best_objective) {}

    const std::vector<double>& best_iterate() const noexcept { return best_; }
    double best_objective() const noexcept { return objective_; }

private:
    std::vector<double> best_;
    double objective_;
};

/// Every candidate in a model search failed; lists the individual failures.
class AggregateError : public std::runtime_error {
public:
    AggregateError(const std::string& what, std::vector<std::string> failures)
        : std::runtime_error(what + join(failures)), failures_(std::move(failures)) {}

    const std::vector<std::string>& failures() const noexcept { return failures_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& item : items) {
            out += "\n  ";
            out += item;
        }
        return out;
    }

    std::vector<std::string> failures_;
};

}  // namespace retail
