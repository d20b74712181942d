#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bnkit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural or numerical problem with a model.
class ModelError : public Error {
public:
    using Error::Error;
};

/// A directed cycle was found; `cycle()` lists its nodes in order.
class CycleError : public ModelError {
public:
    CycleError(const std::string& what, std::vector<std::string> cycle)
        : ModelError(what), cycle_(std::move(cycle)) {}
    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

/// Bad or insufficient observations (parse errors, empty counts, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Evidence naming an unknown node or an out-of-range state.
class EvidenceError : public Error {
public:
    EvidenceError(const std::string& what, std::string field)
        : Error(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Evidence that has probability zero under the model.
class ImpossibleEvidence : public Error {
public:
    using Error::Error;
};

/// Required/forbidden edge sets that cannot be honoured.
class ConstraintError : public Error {
public:
    using Error::Error;
};

/// Request exceeds a configured computational limit.
class LimitError : public Error {
public:
    using Error::Error;
};

/// Connection or protocol failure talking to a service.
class NetworkError : public Error {
public:
    using Error::Error;
};

}  // namespace bnkit
