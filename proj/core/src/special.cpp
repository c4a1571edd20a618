#include "momentsnet/special.hpp"

#include <cmath>
#include <string>

#include "momentsnet/errors.hpp"

namespace momentsnet::special {

namespace {

constexpr int kExactFactorialLimit = 20;

bool is_nonpositive_integer(long double x) {
  return x <= 0.0L && std::floor(x) == x;
}

}  // namespace

long double SignedLog::value() const {
  if (sign == 0) return 0.0L;
  return static_cast<long double>(sign) * std::exp(log_abs);
}

long double factorial(int n) {
  if (n < 0) throw IndexDomainError("factorial of negative integer");
  if (n <= kExactFactorialLimit) {
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }
  return std::exp(log_factorial(n));
}

long double log_factorial(int n) {
  if (n < 0) throw IndexDomainError("factorial of negative integer");
  return std::lgamma(static_cast<long double>(n) + 1.0L);
}

long double binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0.0L;
  if (k > n - k) k = n - k;
  // Each partial product is itself a binomial coefficient, so it stays an
  // integer; exact while below 2^64.
  long double c = 1.0L;
  for (long i = 0; i < k; ++i) c = c * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
  return c < 0x1p63L ? std::round(c) : c;
}

long double pochhammer(long double a, int k) {
  if (k <= kExactFactorialLimit) {
    long double p = 1.0L;
    for (int i = 0; i < k; ++i) p *= a + i;
    return p;
  }
  return log_pochhammer(a, k).value();
}

SignedLog log_pochhammer(long double a, int k) {
  SignedLog out;
  for (int i = 0; i < k; ++i) {
    const long double term = a + i;
    if (term == 0.0L) return SignedLog{0.0L, 0};
    if (term < 0.0L) out.sign = -out.sign;
    out.log_abs += std::log(std::fabs(term));
  }
  return out;
}

SignedLog log_gamma(long double x, const char* what) {
  if (is_nonpositive_integer(x)) {
    throw ParameterError(std::string("gamma pole at ") + what + " = " +
                         std::to_string(static_cast<double>(x)));
  }
  SignedLog out;
  out.log_abs = std::lgamma(x);
  // Gamma is negative on (-2k-1, -2k).
  if (x < 0.0L && static_cast<long long>(std::floor(x)) % 2 != 0) out.sign = -1;
  return out;
}

}  // namespace momentsnet::special
