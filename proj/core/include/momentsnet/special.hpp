#pragma once

// Factorials, binomials, Pochhammer symbols and signed log-gamma used by the
// polynomial evaluators. Small arguments are evaluated exactly in extended
// precision; larger ones go through lgamma with explicit sign tracking.

namespace momentsnet::special {

/// log|x| together with sign(x).
struct SignedLog {
  long double log_abs = 0.0L;
  int sign = 1;  // +1, -1, or 0 for an exact zero

  long double value() const;
};

long double factorial(int n);
long double log_factorial(int n);

/// C(n, k) for integer n >= 0; zero outside 0 <= k <= n.
long double binomial(long n, long k);

/// Rising factorial (a)_k = a (a+1) ... (a+k-1).
long double pochhammer(long double a, int k);
SignedLog log_pochhammer(long double a, int k);

/// Signed log|Gamma(x)|. Throws ParameterError at the poles x = 0, -1, -2, ...
/// The message names `what` so callers can report which argument hit a pole.
SignedLog log_gamma(long double x, const char* what = "gamma argument");

}  // namespace momentsnet::special
