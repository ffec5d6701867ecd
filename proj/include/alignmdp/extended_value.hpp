// Copyright 2026 The alignmdp Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <sstream>
#include <string>

#include "alignmdp/error.hpp"

namespace alignmdp {

// Codomain of undiscounted evaluation: a real, ±∞, or no value at all
// (oscillating or mixed-sign divergent sums).
class ExtendedValue {
 public:
  enum class Kind { kFinite, kPlusInf, kMinusInf, kUndefined };

  ExtendedValue() = default;

  static ExtendedValue finite(double x) { return {Kind::kFinite, x}; }
  static ExtendedValue plus_inf() { return {Kind::kPlusInf, 0.0}; }
  static ExtendedValue minus_inf() { return {Kind::kMinusInf, 0.0}; }
  static ExtendedValue undefined() { return {Kind::kUndefined, 0.0}; }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  bool is_defined() const { return kind_ != Kind::kUndefined; }

  double value() const {
    if (kind_ != Kind::kFinite) throw InvalidArgument("value is not finite");
    return value_;
  }

  // Defined values as doubles (±inf); NaN for Undefined.
  double as_double() const {
    switch (kind_) {
      case Kind::kFinite:
        return value_;
      case Kind::kPlusInf:
        return std::numeric_limits<double>::infinity();
      case Kind::kMinusInf:
        return -std::numeric_limits<double>::infinity();
      case Kind::kUndefined:
        break;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::kPlusInf:
        return "+inf";
      case Kind::kMinusInf:
        return "-inf";
      case Kind::kUndefined:
        return "undefined";
      case Kind::kFinite:
        break;
    }
    std::ostringstream os;
    os.precision(17);
    os << value_;
    return os.str();
  }

  // Structural equality; use `compare` for ordering.
  bool operator==(const ExtendedValue&) const = default;

 private:
  ExtendedValue(Kind kind, double value) : kind_(kind), value_(value) {}

  Kind kind_ = Kind::kFinite;
  double value_ = 0.0;
};

// Total order on defined values; Undefined is unordered against everything.
inline std::partial_ordering compare(const ExtendedValue& a, const ExtendedValue& b) {
  if (!a.is_defined() || !b.is_defined()) return std::partial_ordering::unordered;
  return a.as_double() <=> b.as_double();
}

// Equality up to a relative tolerance on finite values; infinities tie only
// with the same sign.
inline bool tied(const ExtendedValue& a, const ExtendedValue& b, double rel_tol) {
  if (!a.is_defined() || !b.is_defined()) return false;
  if (a.is_finite() && b.is_finite()) {
    const double x = a.value(), y = b.value();
    return std::abs(x - y) <= rel_tol * (1.0 + std::max(std::abs(x), std::abs(y)));
  }
  return a.kind() == b.kind();
}

}  // namespace alignmdp
