#include "tmlg/decimal.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace tmlg {
namespace {

using Mantissa = Decimal::Mantissa;

constexpr std::array<Mantissa, Decimal::kMaxScale + 1> make_pow10() {
    std::array<Mantissa, Decimal::kMaxScale + 1> table{};
    Mantissa value = 1;
    for (std::size_t i = 0; i < table.size(); ++i) {
        table[i] = value;
        if (i + 1 < table.size()) value *= 10;
    }
    return table;
}

constexpr auto kPow10 = make_pow10();

Mantissa checked_mul(Mantissa a, Mantissa b) {
    Mantissa out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw DecimalError("decimal overflow in multiply");
    return out;
}

Mantissa checked_add(Mantissa a, Mantissa b) {
    Mantissa out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw DecimalError("decimal overflow in add");
    return out;
}

Mantissa abs_value(Mantissa v) { return v < 0 ? -v : v; }

Mantissa gcd(Mantissa a, Mantissa b) {
    a = abs_value(a);
    b = abs_value(b);
    while (b != 0) {
        Mantissa t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Brings both operands to the larger scale.
void align(Decimal& a, Decimal& b) {
    if (a.scale() < b.scale()) a = a.rescaled(b.scale());
    else if (b.scale() < a.scale()) b = b.rescaled(a.scale());
}

bool parse_impl(std::string_view text, Mantissa& mantissa, int& scale, const char*& error) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t end = text.size();
    while (end > i && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (i == end) {
        error = "empty number";
        return false;
    }
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    Mantissa value = 0;
    int fraction_digits = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (; i < end; ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            any_digit = true;
            if (__builtin_mul_overflow(value, Mantissa{10}, &value) ||
                __builtin_add_overflow(value, Mantissa{c - '0'}, &value)) {
                error = "too many digits";
                return false;
            }
            if (seen_point) ++fraction_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) {
        error = "no digits";
        return false;
    }
    int exponent = 0;
    if (i < end && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        if (i < end && text[i] == '+') ++i;
        auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + end, exponent);
        if (ec != std::errc{} || ptr == text.data() + i) {
            error = "malformed exponent";
            return false;
        }
        i = static_cast<std::size_t>(ptr - text.data());
    }
    if (i != end) {
        error = "unexpected character";
        return false;
    }
    int s = fraction_digits - exponent;
    if (s < 0) {
        if (-s > Decimal::kMaxScale ||
            __builtin_mul_overflow(value, kPow10[static_cast<std::size_t>(-s)], &value)) {
            error = "exponent overflow";
            return false;
        }
        s = 0;
    }
    if (s > Decimal::kMaxScale) {
        error = "scale too large";
        return false;
    }
    mantissa = negative ? -value : value;
    scale = s;
    return true;
}

}  // namespace

Decimal Decimal::from_parts(Mantissa mantissa, int scale) {
    if (scale < 0 || scale > kMaxScale) throw DecimalError("decimal scale out of range");
    Decimal d;
    d.mantissa_ = mantissa;
    d.scale_ = scale;
    return d;
}

Decimal Decimal::parse(std::string_view text) {
    Mantissa m = 0;
    int s = 0;
    const char* error = nullptr;
    if (!parse_impl(text, m, s, error)) {
        throw DecimalError("invalid decimal '" + std::string(text) + "': " + error);
    }
    return from_parts(m, s);
}

bool Decimal::try_parse(std::string_view text, Decimal& out) noexcept {
    Mantissa m = 0;
    int s = 0;
    const char* error = nullptr;
    if (!parse_impl(text, m, s, error)) return false;
    out.mantissa_ = m;
    out.scale_ = s;
    return true;
}

Decimal Decimal::shifted_right(int digits) const {
    if (digits < 0) throw DecimalError("negative shift");
    Decimal d = scale_ + digits > kMaxScale ? normalized() : *this;
    return from_parts(d.mantissa_, d.scale_ + digits);
}

Decimal Decimal::normalized() const {
    Decimal d = *this;
    while (d.scale_ > 0 && d.mantissa_ % 10 == 0) {
        d.mantissa_ /= 10;
        --d.scale_;
    }
    if (d.mantissa_ == 0) d.scale_ = 0;
    return d;
}

Decimal Decimal::rescaled(int target_scale) const {
    if (target_scale < scale_) throw DecimalError("rescale would lose digits");
    if (target_scale > kMaxScale) throw DecimalError("decimal scale out of range");
    return from_parts(checked_mul(mantissa_, kPow10[static_cast<std::size_t>(target_scale - scale_)]),
                      target_scale);
}

long double Decimal::to_long_double() const {
    return static_cast<long double>(mantissa_) / static_cast<long double>(kPow10[static_cast<std::size_t>(scale_)]);
}

double Decimal::to_double() const { return static_cast<double>(to_long_double()); }

std::string to_string(__int128 value) {
    if (value == 0) return "0";
    bool negative = value < 0;
    // Work in unsigned space so the most negative value prints correctly.
    unsigned __int128 u = negative ? -static_cast<unsigned __int128>(value) : static_cast<unsigned __int128>(value);
    std::string digits;
    while (u != 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (negative) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

std::string Decimal::to_string() const {
    Decimal d = normalized();
    std::string digits = tmlg::to_string(abs_value(d.mantissa_));
    if (d.scale_ > 0) {
        auto scale = static_cast<std::size_t>(d.scale_);
        if (digits.size() <= scale) digits.insert(0, scale - digits.size() + 1, '0');
        digits.insert(digits.size() - scale, 1, '.');
    }
    if (d.mantissa_ < 0) digits.insert(0, 1, '-');
    return digits;
}

Decimal Decimal::operator-() const {
    Decimal d = *this;
    d.mantissa_ = checked_mul(d.mantissa_, -1);
    return d;
}

Decimal& Decimal::operator+=(const Decimal& rhs) {
    Decimal r = rhs;
    align(*this, r);
    mantissa_ = checked_add(mantissa_, r.mantissa_);
    return *this;
}

Decimal& Decimal::operator-=(const Decimal& rhs) { return *this += -rhs; }

Decimal operator*(const Decimal& lhs, const Decimal& rhs) {
    Decimal a = lhs.normalized();
    Decimal b = rhs.normalized();
    Mantissa ma = a.mantissa_;
    Mantissa mb = b.mantissa_;
    int scale = a.scale_ + b.scale_;
    // Trailing zeros of a mantissa can absorb the other operand's scale.
    while (scale > 0 && ma != 0 && ma % 10 == 0) {
        ma /= 10;
        --scale;
    }
    while (scale > 0 && mb != 0 && mb % 10 == 0) {
        mb /= 10;
        --scale;
    }
    return Decimal::from_parts(checked_mul(ma, mb), scale);
}

bool operator==(const Decimal& lhs, const Decimal& rhs) {
    return (lhs <=> rhs) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Decimal& lhs, const Decimal& rhs) {
    Decimal a = lhs.normalized();
    Decimal b = rhs.normalized();
    if (a.is_negative() != b.is_negative()) return a.is_negative() ? std::strong_ordering::less : std::strong_ordering::greater;
    // After normalization a rescale can only fail when the values differ
    // by many orders of magnitude; fall back to long double in that case.
    try {
        align(a, b);
    } catch (const DecimalError&) {
        long double x = lhs.to_long_double();
        long double y = rhs.to_long_double();
        if (x < y) return std::strong_ordering::less;
        if (x > y) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    return a.mantissa_ <=> b.mantissa_;
}

double ratio(const Decimal& numerator, const Decimal& denominator) {
    if (denominator.is_zero()) throw DecimalError("ratio with zero denominator");
    Decimal a = numerator.normalized();
    Decimal b = denominator.normalized();
    align(a, b);
    Mantissa n = a.mantissa();
    Mantissa d = b.mantissa();
    Mantissa g = gcd(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (d < 0) {
        n = -n;
        d = -d;
    }
    return static_cast<double>(static_cast<long double>(n) / static_cast<long double>(d));
}

}  // namespace tmlg
