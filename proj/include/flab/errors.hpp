#pragma once

#include <stdexcept>
#include <string>

namespace flab {

/// Base class for all domain errors raised by the pipeline.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- ingest ---

class MissingColumn : public Error {
public:
    explicit MissingColumn(std::string ticker)
        : Error("missing column for ticker '" + ticker + "'"), ticker_(std::move(ticker)) {}
    const std::string& ticker() const { return ticker_; }

private:
    std::string ticker_;
};

class EmptyWindow : public Error {
public:
    using Error::Error;
};

class MalformedRow : public Error {
public:
    MalformedRow(long line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class NetworkUnavailable : public Error {
public:
    using Error::Error;
};

class HttpStatus : public Error {
public:
    explicit HttpStatus(int status)
        : Error("unexpected HTTP status " + std::to_string(status)), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

class UniverseTooSmall : public Error {
public:
    using Error::Error;
};

// --- stats ---

class InsufficientData : public Error {
public:
    using Error::Error;
};

class DegenerateColumn : public Error {
public:
    explicit DegenerateColumn(std::string ticker)
        : Error("column '" + ticker + "' has zero variance"), ticker_(std::move(ticker)) {}
    const std::string& ticker() const { return ticker_; }

private:
    std::string ticker_;
};

// --- frontier ---

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ZeroVolatility : public Error {
public:
    using Error::Error;
};

class EmptySample : public Error {
public:
    using Error::Error;
};

// --- pca ---

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class DegenerateComponent : public Error {
public:
    explicit DegenerateComponent(int component)
        : Error("eigenvector " + std::to_string(component) +
                " has near-zero entry sum; weights undefined"),
          component_(component) {}
    int component() const { return component_; }

private:
    int component_;
};

class EmptyList : public Error {
public:
    using Error::Error;
};

// --- backtest ---

class NegativeWeightNotAllowed : public Error {
public:
    explicit NegativeWeightNotAllowed(std::string ticker)
        : Error("negative weight for '" + ticker + "' rejected by long-only ledger"),
          ticker_(std::move(ticker)) {}
    const std::string& ticker() const { return ticker_; }

private:
    std::string ticker_;
};

class MissingExitPrice : public Error {
public:
    explicit MissingExitPrice(std::string ticker)
        : Error("no exit price for ticker '" + ticker + "'"), ticker_(std::move(ticker)) {}
    const std::string& ticker() const { return ticker_; }

private:
    std::string ticker_;
};

class WindowNotCovered : public Error {
public:
    using Error::Error;
};

// --- cli / weights files ---

class WeightsNotNormalized : public Error {
public:
    using Error::Error;
};

// --- report orchestration ---

/// Wraps any pipeline error with the stage it occurred in.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace flab
