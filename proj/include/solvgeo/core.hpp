#ifndef SOLVGEO_CORE_HPP
#define SOLVGEO_CORE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace solvgeo {

/// Failure categories; the numeric value doubles as the CLI exit code.
enum class ErrorKind : int {
  validation = 1,      // mathematical validation failure (Jacobi, invariants, preconditions)
  nonconvergence = 2,  // a numerical procedure failed to converge
  io = 3               // parse errors, malformed files, bad indices
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

private:
  ErrorKind kind_;
};

struct Rational {
  long long num = 0;
  long long den = 1;
};

/// Best rational approximation p/q of x with q <= max_den, via continued fractions.
/// Returns nullopt when no q <= max_den reproduces x within tol.
inline std::optional<Rational> rationalize(double x, long long max_den = 1000000,
                                           double tol = 1e-9) {
  double v = x;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(v);
    if (fl > 9e17 || fl < -9e17) break;
    long long a = static_cast<long long>(fl);
    long long p2 = a * p1 + p0;
    long long q2 = a * q1 + q0;
    if (q2 > max_den || q2 < 0) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double rem = v - fl;
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= tol)
      return Rational{p1, q1};
    if (rem < 1e-15) break;
    v = 1.0 / rem;
  }
  if (q1 > 0 && std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= tol)
    return Rational{p1, q1};
  return std::nullopt;
}

}  // namespace solvgeo

#endif
