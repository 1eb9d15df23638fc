#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rem {

// Every failure mode carries a stable machine-readable code so the CLI can
// report errors in a parseable form.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct InvalidArgumentError : Error {
    explicit InvalidArgumentError(const std::string& m) : Error("E_INVALID_ARGUMENT", m) {}
};

struct GridMismatchError : Error {
    explicit GridMismatchError(const std::string& m) : Error("E_GRID_MISMATCH", m) {}
};

struct DegenerateDesignError : Error {
    explicit DegenerateDesignError(const std::string& m) : Error("E_DEGENERATE_DESIGN", m) {}
};

struct InsufficientLocalDataError : Error {
    explicit InsufficientLocalDataError(const std::string& m)
        : Error("E_INSUFFICIENT_LOCAL_DATA", m) {}
};

struct InfeasibleUnitError : Error {
    explicit InfeasibleUnitError(const std::string& m) : Error("E_INFEASIBLE_UNIT", m) {}
};

struct IngestError : Error {
    explicit IngestError(const std::string& m) : Error("E_INGEST", m) {}
};

struct StudyError : Error {
    explicit StudyError(const std::string& m) : Error("E_STUDY", m) {}
};

}  // namespace rem
