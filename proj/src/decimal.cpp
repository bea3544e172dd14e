#include "pairtrade/decimal.hpp"

#include <cstdlib>
#include <limits>

namespace pairtrade {

std::optional<Decimal> Decimal::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '+' || text[0] == '-') {
        negative = text[0] == '-';
        pos = 1;
    }
    constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
    std::int64_t int_part = 0;
    std::size_t int_digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        const int digit = text[pos] - '0';
        if (int_part > (kMax / kScale - digit) / 10) return std::nullopt;
        int_part = int_part * 10 + digit;
        ++pos;
        ++int_digits;
    }
    std::int64_t frac = 0;
    std::size_t frac_digits = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            const int digit = text[pos] - '0';
            if (frac_digits < static_cast<std::size_t>(kFractionDigits)) {
                frac = frac * 10 + digit;
            } else if (digit != 0) {
                return std::nullopt;
            }
            ++frac_digits;
            ++pos;
        }
    }
    if (pos != text.size() || (int_digits == 0 && frac_digits == 0)) return std::nullopt;
    for (std::size_t i = frac_digits; i < static_cast<std::size_t>(kFractionDigits); ++i) frac *= 10;
    const std::int64_t units = int_part * kScale + frac;
    return from_units(negative ? -units : units);
}

std::string Decimal::to_string() const {
    const bool negative = units_ < 0;
    const std::uint64_t magnitude = negative ? static_cast<std::uint64_t>(-(units_ + 1)) + 1
                                             : static_cast<std::uint64_t>(units_);
    std::string out = negative ? "-" : "";
    out += std::to_string(magnitude / kScale);
    std::uint64_t frac = magnitude % kScale;
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(0, static_cast<std::size_t>(kFractionDigits) - digits.size(), '0');
        while (digits.back() == '0') digits.pop_back();
        out += '.';
        out += digits;
    }
    return out;
}

}  // namespace pairtrade
