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

#ifndef WNETKAT_WEIGHT_H_
#define WNETKAT_WEIGHT_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wnetkat {

// Thrown when 64-bit rational arithmetic would overflow.
class WeightOverflow : public std::overflow_error {
 public:
  WeightOverflow() : std::overflow_error("weight arithmetic overflow") {}
};

// Exact signed rational with checked 64-bit numerator/denominator.
// Always normalized: gcd(num, den) == 1 and den > 0.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  static Rational ratio(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_negative() const { return num_ < 0; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  Rational operator-() const;
  Rational operator+(const Rational& b) const;
  Rational operator-(const Rational& b) const;
  Rational operator*(const Rational& b) const;

  std::strong_ordering operator<=>(const Rational& b) const;
  bool operator==(const Rational& b) const = default;

  // Decimal when the expansion terminates (den = 2^a * 5^b), "n/d" otherwise.
  std::string to_string() const;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

// Weight domain: non-negative rational extended with Infinity.
// Infinity absorbs addition, min(Infinity, k) = k, max(Infinity, k) = Infinity.
class Weight {
 public:
  Weight() : infinite_(false), value_() {}
  static Weight infinity();
  static Weight integer(std::int64_t n);
  static Weight ratio(std::int64_t num, std::int64_t den);
  // Pre: r is non-negative.
  static Weight from_rational(const Rational& r);
  // Accepts a decimal literal ("4", "2.5") or "inf"; exact, no floats.
  static std::optional<Weight> parse(std::string_view text);

  bool is_infinite() const { return infinite_; }
  bool is_zero() const { return !infinite_ && value_.is_zero(); }
  // Pre: !is_infinite().
  const Rational& finite() const;

  Weight plus(const Weight& b) const;
  // Truncated subtraction: max(0, a - b); k - Infinity = 0.
  Weight monus(const Weight& b) const;
  Weight min(const Weight& b) const;
  Weight max(const Weight& b) const;

  std::strong_ordering operator<=>(const Weight& b) const;
  bool operator==(const Weight& b) const = default;

  std::string to_string() const;

 private:
  bool infinite_;
  Rational value_;
};

}  // namespace wnetkat

#endif  // WNETKAT_WEIGHT_H_
