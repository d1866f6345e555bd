#pragma once

#include <stdexcept>
#include <string>

namespace nestfix {

// Malformed input text; carries a location when one is known.
struct ParseError : std::runtime_error {
  int line = 0, column = 0;
  explicit ParseError(const std::string& msg, int line_ = 0, int col_ = 0)
      : std::runtime_error(line_ ? "line " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg
                                 : msg),
        line(line_),
        column(col_) {}
};

// Well-formed input that violates a semantic contract (row sums, totality, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configured size cap was exceeded (fixpoint-game or chained-product build).
struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nestfix
