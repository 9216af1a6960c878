#include "knowada/core/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "knowada/core/error.hpp"
#include "knowada/core/text.hpp"

namespace knowada {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorKind::contract, "rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Rational ratio(std::int64_t num, std::int64_t den) { return Rational(num, den); }

namespace {

std::int64_t parse_int(std::string_view digits, std::string_view whole) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size())
        throw Error(ErrorKind::validation, "not a number: '" + std::string(whole) + "'");
    return value;
}

// "12.5" -> 125/10
Rational parse_decimal(std::string_view s, std::string_view whole) {
    if (s.empty()) throw Error(ErrorKind::validation, "empty number");
    const auto dot = s.find('.');
    if (dot == std::string_view::npos) return Rational::integer(parse_int(s, whole));
    const std::string_view int_part = s.substr(0, dot);
    const std::string_view frac_part = s.substr(dot + 1);
    if (frac_part.size() > 15)
        throw Error(ErrorKind::validation, "too many decimal places: '" + std::string(whole) + "'");
    if (int_part.empty() && frac_part.empty())
        throw Error(ErrorKind::validation, "not a number: '" + std::string(whole) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    const std::int64_t ip = int_part.empty() ? 0 : parse_int(int_part, whole);
    const std::int64_t fp = frac_part.empty() ? 0 : parse_int(frac_part, whole);
    if (ip > std::numeric_limits<std::int64_t>::max() / scale)
        throw Error(ErrorKind::validation, "number out of range: '" + std::string(whole) + "'");
    return Rational(ip * scale + fp, scale);
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) throw Error(ErrorKind::validation, "empty rational");
    bool negative = false;
    if (s.front() == '-') {
        negative = true;
        s.remove_prefix(1);
    }
    Rational value;
    if (!s.empty() && s.back() == '%') {
        const Rational pct = parse_decimal(trim(s.substr(0, s.size() - 1)), text);
        value = Rational(pct.num(), pct.den() * 100);
    } else if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        value = Rational(parse_int(trim(s.substr(0, slash)), text),
                         parse_int(trim(s.substr(slash + 1)), text));
    } else {
        value = parse_decimal(s, text);
    }
    return negative ? Rational(-value.num(), value.den()) : value;
}

std::string Rational::to_string() const {
    std::int64_t d = den_;
    int twos = 0;
    int fives = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++twos;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++fives;
    }
    if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
    if (den_ == 1) return std::to_string(num_);

    const int places = std::max(twos, fives);
    __int128 scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const __int128 scaled = static_cast<__int128>(num_) * (scale / den_);
    const bool negative = scaled < 0;
    const __int128 mag = negative ? -scaled : scaled;
    std::string frac(static_cast<std::size_t>(places), '0');
    __int128 rem = mag % scale;
    for (int i = places - 1; i >= 0; --i) {
        frac[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(rem % 10));
        rem /= 10;
    }
    const auto whole = static_cast<std::int64_t>(mag / scale);
    return (negative ? "-" : "") + std::to_string(whole) + "." + frac;
}

}  // namespace knowada
