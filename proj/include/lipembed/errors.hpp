#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lipembed {

// Base class for all library failures. The CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file or unparsable value. Exit code 1.
struct ParseError : Error {
  using Error::Error;
};

// Violated operation precondition (dimension mismatch, non-injective data,
// target dimension outside a theorem's range, ...). Exit code 2.
struct PreconditionError : Error {
  using Error::Error;
};

// A randomized search exhausted its budget. Carries the best candidate seen
// so callers can inspect or retry. Exit code 3.
struct SearchError : Error {
  SearchError(const std::string& what, double score,
              std::vector<double> candidate = {}, int wi = -1, int wj = -1)
      : Error(what),
        best_score(score),
        best_candidate(std::move(candidate)),
        witness_i(wi),
        witness_j(wj) {}

  double best_score = 0.0;
  std::vector<double> best_candidate;  // direction / flattened matrices
  int witness_i = -1;                  // violating point pair, when known
  int witness_j = -1;
};

// Two curve germs are not outer bi-Lipschitz equivalent. Exit code 4.
struct NotEquivalentError : Error {
  using Error::Error;
};

}  // namespace lipembed
