#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace knowada {

// Exact non-negative-denominator fraction, always stored in lowest terms.
// Used wherever a ratio is compared against a threshold or tested for
// equality, so that 0.2 vs 2/10 never depends on floating-point rounding.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den);
    static Rational integer(std::int64_t value) { return Rational(value, 1); }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Accepts "20%", "12.5%", "0.2", "1/5", "1".
    static Rational parse(std::string_view text);

    // Finite decimals render as decimals ("0.2"), everything else as "n/d".
    std::string to_string() const;

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// num/den as a Rational; den == 0 is a contract error.
Rational ratio(std::int64_t num, std::int64_t den);

}  // namespace knowada
