// decimal.hpp
// Fixed-point decimal with 8 fractional digits, used for exchange prices and volumes.

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pairtrade {

class Decimal {
public:
    static constexpr int kFractionDigits = 8;
    static constexpr std::int64_t kScale = 100'000'000;

    constexpr Decimal() = default;

    static constexpr Decimal from_units(std::int64_t units) {
        Decimal d;
        d.units_ = units;
        return d;
    }

    // Accepts [+-]digits[.digits]. More than 8 fractional digits is accepted only
    // when the extra digits are zero. Returns nullopt on anything else, including overflow.
    static std::optional<Decimal> parse(std::string_view text);

    constexpr std::int64_t units() const { return units_; }
    double to_double() const { return static_cast<double>(units_) / static_cast<double>(kScale); }

    // Shortest exact decimal rendering ("39050", "0.5", "-1.25").
    std::string to_string() const;

    friend constexpr auto operator<=>(Decimal, Decimal) = default;
    friend constexpr Decimal operator+(Decimal a, Decimal b) { return from_units(a.units_ + b.units_); }

private:
    std::int64_t units_ = 0;
};

}  // namespace pairtrade
