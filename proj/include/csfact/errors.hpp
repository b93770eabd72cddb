#ifndef CSFACT_ERRORS_HPP
#define CSFACT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace csfact {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape / size mismatches.
struct DimensionError : Error {
  using Error::Error;
};

// Bad user-supplied parameter (k > n, m > l, ...).
struct ParameterError : Error {
  using Error::Error;
};

// Iteration caps, residuals out of tolerance, inconsistent numerical ranks.
struct NumericalError : Error {
  using Error::Error;
};

// rank(D) != rank(A) where the factorizations require equality.
struct RankMismatchError : Error {
  RankMismatchError(int rank_d, int rank_a)
      : Error("rank mismatch: rank(D) = " + std::to_string(rank_d) +
              ", rank(A) = " + std::to_string(rank_a)),
        rank_d(rank_d),
        rank_a(rank_a) {}
  int rank_d;
  int rank_a;
};

struct SingularityError : Error {
  using Error::Error;
};

struct NotTightFrameError : Error {
  using Error::Error;
};

// Malformed CSMX / CSV input.
struct FormatError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace csfact

#endif
