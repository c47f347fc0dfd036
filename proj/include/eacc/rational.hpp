#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace eacc {

// Exact fraction arithmetic for channels with rational entries. Keeps results
// like 5/6 provable instead of tolerance-checked. Values stay tiny, but
// intermediates go through 128-bit to be safe.
struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational of(long long n, long long d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const long long g = std::gcd(n < 0 ? -n : n, d);
        return Rational{g ? n / g : 0, g ? d / g : 1};
    }

    // Recovers p/q from a double via continued fractions, accepting only if
    // p/q rounds back to the exact same double.
    static std::optional<Rational> from_double(double x, long long max_den = 1000000) {
        if (!std::isfinite(x)) return std::nullopt;
        const bool neg = x < 0;
        const double ax = neg ? -x : x;
        long long p_prev = 1, q_prev = 0;
        long long p = static_cast<long long>(std::floor(ax));
        long long q = 1;
        double frac = ax - std::floor(ax);
        for (int iter = 0; iter < 64; ++iter) {
            const double cand = static_cast<double>(p) / static_cast<double>(q);
            if (cand == ax) return of(neg ? -p : p, q);
            if (frac == 0.0) break;
            const double inv = 1.0 / frac;
            const double fl = std::floor(inv);
            if (fl > 9.2e18) break;
            const long long a = static_cast<long long>(fl);
            frac = inv - fl;
            const long long p_next = a * p + p_prev;
            const long long q_next = a * q + q_prev;
            if (q_next > max_den || q_next <= 0) break;
            p_prev = p;
            q_prev = q;
            p = p_next;
            q = q_next;
        }
        return std::nullopt;
    }

    Rational operator+(const Rational& o) const {
        const __int128 n = static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den;
        const __int128 d = static_cast<__int128>(den) * o.den;
        return reduce(n, d);
    }

    Rational operator*(const Rational& o) const {
        const __int128 n = static_cast<__int128>(num) * o.num;
        const __int128 d = static_cast<__int128>(den) * o.den;
        return reduce(n, d);
    }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const {
        return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
    }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

private:
    static Rational reduce(__int128 n, __int128 d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a == 0) return Rational{0, 1};
        n /= a;
        d /= a;
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("Rational: overflow after reduction");
        return Rational{static_cast<long long>(n), static_cast<long long>(d)};
    }
};

}  // namespace eacc
