#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sacks {

// Error kinds shared across the library. Every throwing operation names one
// of these so the CLI can map failures onto its exit-code contract.
enum class ErrorKind {
    NodeNotInTree,
    NotARefinement,
    IncompatibleSuitable,
    InsufficientDepth,
    ParseError,
    IndexBeyondOutput,
    MissingX,
    NotNice,
    InfiniteFix,
    UnknownType,
    BackendMismatch,
    BudgetExceeded,
    PremiseFailure,
    BadInput,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

class BudgetExceeded : public Error {
  public:
    explicit BudgetExceeded(std::string message)
        : Error(ErrorKind::BudgetExceeded, std::move(message)) {}
};

class PremiseFailure : public Error {
  public:
    explicit PremiseFailure(std::string message)
        : Error(ErrorKind::PremiseFailure, std::move(message)) {}
};

class ParseError : public Error {
  public:
    ParseError(std::size_t position, std::string expected, std::string message)
        : Error(ErrorKind::ParseError, std::move(message)),
          position_(position),
          expected_(std::move(expected)) {}

    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

  private:
    std::size_t position_;
    std::string expected_;
};

// Witness record for a failed check inside a verification report.
struct CheckFailure {
    std::size_t index = 0;
    std::string check;
    std::string detail;

    bool operator==(const CheckFailure&) const = default;
};

// Verification outcome used by fusion/antichain/code/audit checkers.
// ok holds exactly when failures is empty.
struct Report {
    std::vector<CheckFailure> failures;

    bool ok() const { return failures.empty(); }

    void flag(std::size_t index, std::string check, std::string detail) {
        failures.push_back({index, std::move(check), std::move(detail)});
    }
};

}  // namespace sacks
