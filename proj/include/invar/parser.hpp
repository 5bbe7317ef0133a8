#pragma once

#include "invar/term.hpp"

#include <stdexcept>
#include <string>

namespace invar {

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at line " + std::to_string(line_) + ", column " +
                           std::to_string(col_)),
        line(line_),
        column(col_) {}
};

// Parses the contraction grammar (see docs/GRAMMAR.md). Every index must
// appear exactly twice within its term; explicit metric links are normalized
// away on ingest. Throws ParseError.
LinearCombination parse(const std::string& text);

// Parse variant that admits free (once-occurring) indices; their names map
// to stable free labels. Used for open templates in tests and tools.
LinearCombination parse_open(const std::string& text);

// Deterministic text form: terms in canonical-key order, deterministic index
// naming. parse(print(lc)) equals lc term-for-term for canonical lc.
std::string print(const LinearCombination& lc);
std::string print(const Contraction& c);

}  // namespace invar
