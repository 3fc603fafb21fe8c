#pragma once

#include <stdexcept>
#include <string>

namespace aqb {

// Error categories surfaced across the library.  Every failure thrown by aqbound
// is an aqb::Error carrying one of these codes; the C API maps them to aqb_status.
enum class ErrorCode {
    InvalidArgument,   // bad parameter, malformed config, contradictory options
    Io,                // file missing / unreadable / unwritable
    CsvParse,          // malformed CSV (unterminated quote, ragged row, ...)
    MissingColumn,     // schema names a column absent from the CSV header
    DuplicateBaseId,   // base relation id tuple appears twice
    UnparseableNumber, // numeric column cell that does not parse / is not finite
    SchemaViolation,   // schema json invalid or inconsistent with its relation
    QuerySyntax,       // query text does not parse
    UnknownColumn,     // query references a column neither relation has
    NegativeValue,     // aggregation target negative on a qualifying pair
    Infeasible,        // full coverage impossible under the in-degree cap
    TooLarge,          // brute-force enumeration over the size guard
    ZeroNominal,       // relative error against a zero nominal result
    UndefinedAverage,  // AVG bounds with no positive-weight edge (d = 0)
    NoBoundingCap,     // no cap in the sweep produced a truth-containing interval
    Internal,          // invariant breakage; always a bug
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace aqb
