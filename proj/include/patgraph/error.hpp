#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace patgraph {

enum class ErrorKind {
  // graph store
  EmptyLabels,
  ConstraintViolation,
  PreexistingDuplicates,
  DanglingEndpoint,
  UnknownNode,
  UnknownEdge,
  NodeHasEdges,
  UnknownVariable,
  IoFailure,
  FormatError,
  // fad layer
  UnknownDesign,
  UnknownProduct,
  UnknownGeometry,
  DuplicateProductId,
  DuplicateGeometricId,
  DuplicateClaimId,
  InvalidClaim,
  InvalidArgument,
  BadFunctionId,
  CsvFormatError,
  // query / scoring
  BadRegex,
  ParseError,
  ReadOnlyViolation,
  EmptyCorpus,
  // service / tooling
  BindFailure,
  SnapshotLoadFailure,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyLabels: return "EmptyLabels";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::PreexistingDuplicates: return "PreexistingDuplicates";
    case ErrorKind::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::UnknownEdge: return "UnknownEdge";
    case ErrorKind::NodeHasEdges: return "NodeHasEdges";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::UnknownDesign: return "UnknownDesign";
    case ErrorKind::UnknownProduct: return "UnknownProduct";
    case ErrorKind::UnknownGeometry: return "UnknownGeometry";
    case ErrorKind::DuplicateProductId: return "DuplicateProductId";
    case ErrorKind::DuplicateGeometricId: return "DuplicateGeometricId";
    case ErrorKind::DuplicateClaimId: return "DuplicateClaimId";
    case ErrorKind::InvalidClaim: return "InvalidClaim";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::BadFunctionId: return "BadFunctionId";
    case ErrorKind::CsvFormatError: return "CsvFormatError";
    case ErrorKind::BadRegex: return "BadRegex";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ReadOnlyViolation: return "ReadOnlyViolation";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::BindFailure: return "BindFailure";
    case ErrorKind::SnapshotLoadFailure: return "SnapshotLoadFailure";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Every library failure is reported through this type; `kind()` is the
// machine-readable part, `what()` the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Query-language syntax error with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string expected,
             const std::string& message)
      : Error(ErrorKind::ParseError, message),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }

  // `line:col expected <set>`
  std::string render() const {
    return std::to_string(line_) + ":" + std::to_string(column_) +
           " expected " + expected_;
  }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

// CSV error that knows which sheet row produced it.
class CsvError : public Error {
 public:
  CsvError(std::string sheet, std::size_t row, const std::string& message)
      : Error(ErrorKind::CsvFormatError,
              sheet + ":" + std::to_string(row) + ": " + message),
        sheet_(std::move(sheet)),
        row_(row) {}

  const std::string& sheet() const noexcept { return sheet_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::string sheet_;
  std::size_t row_;
};

}  // namespace patgraph
