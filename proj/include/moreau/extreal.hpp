#pragma once

// Extended reals R u {-inf, +inf} with max-plus conventions.
//
//   oplus(a, b)  = max(a, b)          neutral element -inf
//   otimes(a, b) = a + b              neutral element 0, -inf absorbing
//
// -inf is absorbing for addition everywhere, so (+inf) + (-inf) = -inf.
// NaN never enters an ExtReal: the constructor rejects it.

#include <cmath>
#include <cstdio>
#include <compare>
#include <limits>
#include <stdexcept>
#include <string>

namespace moreau {

class ExtReal {
public:
    constexpr ExtReal() noexcept : v_(0.0) {}

    // NOLINTNEXTLINE(google-explicit-constructor)
    ExtReal(double v) : v_(v) {
        if (std::isnan(v)) throw std::invalid_argument("ExtReal: NaN is not an extended real");
    }

    static constexpr ExtReal pos_inf() noexcept { return ExtReal(tag{}, std::numeric_limits<double>::infinity()); }
    static constexpr ExtReal neg_inf() noexcept { return ExtReal(tag{}, -std::numeric_limits<double>::infinity()); }
    static constexpr ExtReal zero() noexcept { return ExtReal(tag{}, 0.0); }

    [[nodiscard]] constexpr double value() const noexcept { return v_; }
    [[nodiscard]] bool is_finite() const noexcept { return std::isfinite(v_); }
    [[nodiscard]] constexpr bool is_pos_inf() const noexcept { return v_ == std::numeric_limits<double>::infinity(); }
    [[nodiscard]] constexpr bool is_neg_inf() const noexcept { return v_ == -std::numeric_limits<double>::infinity(); }

    constexpr ExtReal operator-() const noexcept { return ExtReal(tag{}, -v_); }

    constexpr bool operator==(const ExtReal&) const noexcept = default;
    constexpr auto operator<=>(const ExtReal& o) const noexcept {
        // v_ is never NaN, so the partial order on doubles is total here.
        return v_ < o.v_ ? std::strong_ordering::less
             : v_ > o.v_ ? std::strong_ordering::greater
                         : std::strong_ordering::equal;
    }

private:
    struct tag {};
    constexpr ExtReal(tag, double v) noexcept : v_(v) {}
    double v_;
};

inline constexpr ExtReal oplus(ExtReal a, ExtReal b) noexcept { return a < b ? b : a; }

inline ExtReal otimes(ExtReal a, ExtReal b) noexcept {
    if (a.is_neg_inf() || b.is_neg_inf()) return ExtReal::neg_inf();
    // remaining cases cannot produce NaN: +inf + finite, +inf + +inf, finite + finite
    return ExtReal(a.value() + b.value());
}

/// a - b under the absorbing convention, i.e. otimes(a, -b).
inline ExtReal minus(ExtReal a, ExtReal b) noexcept { return otimes(a, -b); }

inline constexpr ExtReal min(ExtReal a, ExtReal b) noexcept { return b < a ? b : a; }
inline constexpr ExtReal max(ExtReal a, ExtReal b) noexcept { return oplus(a, b); }

inline std::string to_string(ExtReal a) {
    if (a.is_pos_inf()) return "+inf";
    if (a.is_neg_inf()) return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", a.value());
    return buf;
}

/// Accepts "+inf", "inf", "-inf" and anything std::stod parses to a non-NaN value.
inline ExtReal parse_extreal(const std::string& s) {
    if (s == "+inf" || s == "inf" || s == "+Inf" || s == "Infinity") return ExtReal::pos_inf();
    if (s == "-inf" || s == "-Inf" || s == "-Infinity") return ExtReal::neg_inf();
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("not an extended real: '" + s + "'");
    return ExtReal(v);
}

}  // namespace moreau
