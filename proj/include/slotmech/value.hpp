#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace slotmech {

// Valuations and delays share one unit (waiting-time periods) and are kept
// as fixed-point integers: `amount` is periods times the instance scale.
// All mechanism arithmetic on them is exact; floating point only appears in
// the posted-price schedule, which is irrational by construction.
struct Value {
  std::int64_t amount = 0;

  constexpr Value() = default;
  constexpr explicit Value(std::int64_t a) : amount(a) {}

  friend constexpr Value operator+(Value a, Value b) { return Value{a.amount + b.amount}; }
  friend constexpr Value operator-(Value a, Value b) { return Value{a.amount - b.amount}; }
  constexpr Value operator-() const { return Value{-amount}; }
  constexpr Value& operator+=(Value o) { amount += o.amount; return *this; }
  constexpr Value& operator-=(Value o) { amount -= o.amount; return *this; }
  friend constexpr Value operator*(Value a, std::int64_t f) { return Value{a.amount * f}; }
  friend constexpr auto operator<=>(Value a, Value b) = default;
};

inline constexpr std::int64_t kDefaultScale = 1000;

// Periods as a real number, for human-facing output only.
inline double to_periods(Value v, std::int64_t scale) {
  return static_cast<double>(v.amount) / static_cast<double>(scale);
}

inline std::string to_string(Value v) { return std::to_string(v.amount); }

}  // namespace slotmech
