// Copyright 2026 The WNetKAT authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wnetkat/weight.h"

#include <cctype>
#include <cstdlib>
#include <numeric>

namespace wnetkat {
namespace {

using Int128 = __int128;

std::int64_t CheckedNarrow(Int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw WeightOverflow();
  return static_cast<std::int64_t>(v);
}

Int128 Gcd128(Int128 a, Int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational MakeNormalized(Int128 num, Int128 den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Int128 g = Gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational::ratio(CheckedNarrow(num), CheckedNarrow(den));
}

}  // namespace

Rational Rational::ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  std::int64_t g = std::gcd(num, den);
  if (g != 0) {
    num /= g;
    den /= g;
  }
  if (den < 0) {
    if (num == INT64_MIN || den == INT64_MIN) throw WeightOverflow();
    num = -num;
    den = -den;
  }
  Rational r;
  r.num_ = num;
  r.den_ = den;
  return r;
}

Rational Rational::operator-() const {
  if (num_ == INT64_MIN) throw WeightOverflow();
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational Rational::operator+(const Rational& b) const {
  Int128 num = Int128(num_) * b.den_ + Int128(b.num_) * den_;
  Int128 den = Int128(den_) * b.den_;
  return MakeNormalized(num, den);
}

Rational Rational::operator-(const Rational& b) const {
  Int128 num = Int128(num_) * b.den_ - Int128(b.num_) * den_;
  Int128 den = Int128(den_) * b.den_;
  return MakeNormalized(num, den);
}

Rational Rational::operator*(const Rational& b) const {
  return MakeNormalized(Int128(num_) * b.num_, Int128(den_) * b.den_);
}

std::strong_ordering Rational::operator<=>(const Rational& b) const {
  Int128 lhs = Int128(num_) * b.den_;
  Int128 rhs = Int128(b.num_) * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  // Terminating decimal iff den = 2^a * 5^b; scale to a power of ten.
  std::int64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
  int k = twos > fives ? twos : fives;
  Int128 scaled = Int128(num_);
  for (int i = 0; i < k - twos; ++i) scaled *= 2;
  for (int i = 0; i < k - fives; ++i) scaled *= 5;
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string digits;
  if (scaled == 0) digits = "0";
  while (scaled > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + int(scaled % 10)));
    scaled /= 10;
  }
  while (static_cast<int>(digits.size()) <= k) digits.insert(digits.begin(), '0');
  digits.insert(digits.end() - k, '.');
  while (digits.back() == '0') digits.pop_back();
  if (digits.back() == '.') digits.pop_back();
  return (neg ? "-" : "") + digits;
}

Weight Weight::infinity() {
  Weight w;
  w.infinite_ = true;
  return w;
}

Weight Weight::integer(std::int64_t n) { return from_rational(Rational(n)); }

Weight Weight::ratio(std::int64_t num, std::int64_t den) {
  return from_rational(Rational::ratio(num, den));
}

Weight Weight::from_rational(const Rational& r) {
  if (r.is_negative()) throw std::invalid_argument("negative weight");
  Weight w;
  w.value_ = r;
  return w;
}

std::optional<Weight> Weight::parse(std::string_view text) {
  if (text == "inf") return infinity();
  if (text.empty()) return std::nullopt;
  std::string_view intpart = text;
  std::string_view fracpart;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    intpart = text.substr(0, dot);
    fracpart = text.substr(dot + 1);
    if (fracpart.empty()) return std::nullopt;
  }
  if (intpart.empty()) return std::nullopt;
  auto all_digits = [](std::string_view s) {
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  if (!all_digits(intpart) || !all_digits(fracpart)) return std::nullopt;
  try {
    Int128 num = 0;
    Int128 den = 1;
    for (char c : intpart) {
      num = num * 10 + (c - '0');
      if (num > Int128(INT64_MAX) * Int128(INT64_MAX)) return std::nullopt;
    }
    for (char c : fracpart) {
      num = num * 10 + (c - '0');
      den *= 10;
      if (num > Int128(INT64_MAX) * Int128(INT64_MAX)) return std::nullopt;
    }
    return from_rational(MakeNormalized(num, den));
  } catch (const WeightOverflow&) {
    return std::nullopt;
  }
}

const Rational& Weight::finite() const {
  if (infinite_) throw std::logic_error("finite() on infinite weight");
  return value_;
}

Weight Weight::plus(const Weight& b) const {
  if (infinite_ || b.infinite_) return infinity();
  return from_rational(value_ + b.value_);
}

Weight Weight::monus(const Weight& b) const {
  if (b.infinite_) return Weight();
  if (infinite_) return infinity();
  Rational d = value_ - b.value_;
  return d.is_negative() ? Weight() : from_rational(d);
}

Weight Weight::min(const Weight& b) const { return *this <= b ? *this : b; }

Weight Weight::max(const Weight& b) const { return *this >= b ? *this : b; }

std::strong_ordering Weight::operator<=>(const Weight& b) const {
  if (infinite_ && b.infinite_) return std::strong_ordering::equal;
  if (infinite_) return std::strong_ordering::greater;
  if (b.infinite_) return std::strong_ordering::less;
  return value_ <=> b.value_;
}

std::string Weight::to_string() const {
  return infinite_ ? "inf" : value_.to_string();
}

}  // namespace wnetkat
