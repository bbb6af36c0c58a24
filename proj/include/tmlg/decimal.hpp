#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tmlg {

class DecimalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact signed decimal: value = mantissa * 10^-scale.
///
/// Token amounts on 18-decimal contracts exceed the integer range of a double,
/// so volumes are accumulated here and only converted to floating point when
/// multiplied by a USD price. All arithmetic is overflow-checked and throws
/// DecimalError instead of wrapping.
class Decimal {
public:
    using Mantissa = __int128;
    static constexpr int kMaxScale = 38;

    constexpr Decimal() = default;
    constexpr Decimal(std::int64_t integer) : mantissa_(integer) {}  // NOLINT(implicit)

    static Decimal from_parts(Mantissa mantissa, int scale);

    /// Parses "123", "-1.50", "1.5e+21" and friends. Exponents are applied
    /// exactly by shifting the scale. Throws DecimalError on malformed text.
    static Decimal parse(std::string_view text);
    static bool try_parse(std::string_view text, Decimal& out) noexcept;

    Mantissa mantissa() const { return mantissa_; }
    int scale() const { return scale_; }

    bool is_zero() const { return mantissa_ == 0; }
    bool is_negative() const { return mantissa_ < 0; }

    /// Divides by 10^digits without rounding (only the scale moves).
    Decimal shifted_right(int digits) const;

    /// Same value with trailing fractional zeros removed.
    Decimal normalized() const;

    /// Same value at a larger scale. Throws if the target is smaller than
    /// scale() or the mantissa overflows.
    Decimal rescaled(int target_scale) const;

    double to_double() const;
    long double to_long_double() const;

    /// Canonical fixed-point text, never scientific notation. Trailing
    /// fractional zeros are stripped ("1.50" prints as "1.5").
    std::string to_string() const;

    Decimal operator-() const;
    Decimal& operator+=(const Decimal& rhs);
    Decimal& operator-=(const Decimal& rhs);
    friend Decimal operator+(Decimal lhs, const Decimal& rhs) { return lhs += rhs; }
    friend Decimal operator-(Decimal lhs, const Decimal& rhs) { return lhs -= rhs; }
    friend Decimal operator*(const Decimal& lhs, const Decimal& rhs);

    friend bool operator==(const Decimal& lhs, const Decimal& rhs);
    friend std::strong_ordering operator<=>(const Decimal& lhs, const Decimal& rhs);

private:
    Mantissa mantissa_ = 0;
    int scale_ = 0;
};

/// numerator / denominator as a double, computed on the gcd-reduced exact
/// fraction so that scaling both operands by a common factor yields a
/// bit-identical result. Throws DecimalError on a zero denominator.
double ratio(const Decimal& numerator, const Decimal& denominator);

std::string to_string(__int128 value);

}  // namespace tmlg
