#include "fractalvec/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "fractalvec/errors.hpp"

namespace fractalvec {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw PreconditionError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

Rational Rational::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s) -> std::int64_t {
    s = trim(s);
    if (s.empty()) throw PreconditionError("empty rational component");
    std::size_t pos = 0;
    const std::string str(s);
    long long value = 0;
    try {
      value = std::stoll(str, &pos);
    } catch (const std::exception&) {
      throw PreconditionError("cannot parse rational '" + str + "'");
    }
    if (pos != str.size()) throw PreconditionError("cannot parse rational '" + str + "'");
    return value;
  };

  text = trim(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos)
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) throw PreconditionError("too many decimals in '" + std::string(text) + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::string whole = std::string(text.substr(0, dot)) + std::string(frac);
    return Rational(parse_int(whole.empty() || whole == "-" ? whole + "0" : whole), den);
  }
  return Rational(parse_int(text));
}

double Rational::pow_to_double(int n) const {
  if (n < 0) return Rational(den_, num_).pow_to_double(-n);
  std::int64_t p = 1, q = 1;
  for (int i = 0; i < n; ++i) {
    if (__builtin_mul_overflow(p, num_, &p) || __builtin_mul_overflow(q, den_, &q))
      return std::pow(to_double(), n);
  }
  return static_cast<double>(p) / static_cast<double>(q);
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) { return Rational(a.num_ * b.num_, a.den_ * b.den_); }

bool operator<(const Rational& a, const Rational& b) { return a.num_ * b.den_ < b.num_ * a.den_; }

}  // namespace fractalvec
