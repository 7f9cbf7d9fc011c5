#include "phodge/arith.hpp"

#include <deque>
#include <map>

#include "phodge/errors.hpp"

namespace phodge {

const Integer& ppow(long p, long k) {
  // deque keeps references stable as the table grows
  thread_local std::map<long, std::deque<Integer>> cache;
  if (k < 0) fail(Errc::InvalidArgument, "negative exponent in ppow");
  auto& powers = cache[p];
  if (powers.empty()) powers.emplace_back(1);
  while (static_cast<long>(powers.size()) <= k) powers.push_back(powers.back() * p);
  return powers[static_cast<std::size_t>(k)];
}

Rational ppow_q(long p, long k) {
  if (k >= 0) return Rational(ppow(p, k));
  return Rational(Integer(1), ppow(p, -k));
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::optional<long> vp(const Integer& x, long p) {
  if (x == 0) return std::nullopt;
  Integer y = x;
  long v = 0;
  while (mpz_divisible_ui_p(y.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), static_cast<unsigned long>(p));
    ++v;
  }
  return v;
}

std::optional<long> vp(const Rational& x, long p) {
  if (x == 0) return std::nullopt;
  return *vp(Integer(x.get_num()), p) - *vp(Integer(x.get_den()), p);
}

long floor_log(long p, long n) {
  long k = 0;
  long q = p;
  while (q <= n) {
    ++k;
    if (q > n / p) break;
    q *= p;
  }
  return k;
}

long vp_factorial(long p, long n) {
  long v = 0;
  for (long q = p; q <= n; q *= p) {
    v += n / q;
    if (q > n / p) break;
  }
  return v;
}

Rational binomial(const Rational& e, long k) {
  Rational r = 1;
  for (long j = 0; j < k; ++j) {
    r *= (e - j);
    r /= (j + 1);
  }
  return r;
}

Integer mod_floor(const Integer& x, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

Integer mod_inverse(const Integer& a, const Integer& m) {
  Integer r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    fail(Errc::DivisionByZero, "element is not invertible modulo " + m.get_str());
  return r;
}

Integer rational_mod(const Rational& x, long p, long k) {
  const Integer& m = ppow(p, k);
  if (k == 0) return 0;
  Integer den = x.get_den();
  if (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p)))
    fail(Errc::DivisionByZero, "rational is not p-integral");
  return mod_floor(Integer(x.get_num()) * mod_inverse(den, m), m);
}

Rational parse_rational(const std::string& text) {
  Rational r;
  std::string s = text;
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  if (s.empty() || r.set_str(s, 10) != 0 || r.get_den() == 0)
    fail(Errc::SchemaError, "not a rational number: '" + text + "'");
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& x) { return x.get_str(); }
std::string to_string(const Integer& x) { return x.get_str(); }

Integer floor_q(const Rational& x) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

}  // namespace phodge
