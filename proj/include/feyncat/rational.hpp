#ifndef FEYNCAT_RATIONAL_HPP
#define FEYNCAT_RATIONAL_HPP

#include <boost/rational.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace feyncat {

using Rat = boost::rational<long long>;

inline double to_double(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Exact complex number with rational real and imaginary parts.
struct CRat {
    Rat re{0};
    Rat im{0};

    CRat() = default;
    CRat(Rat r) : re(r) {}
    CRat(long long r) : re(r) {}
    CRat(Rat r, Rat i) : re(r), im(i) {}

    static CRat i() { return CRat{Rat(0), Rat(1)}; }

    CRat operator+(const CRat& o) const { return {re + o.re, im + o.im}; }
    CRat operator-(const CRat& o) const { return {re - o.re, im - o.im}; }
    CRat operator-() const { return {-re, -im}; }
    CRat operator*(const CRat& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    CRat conj() const { return {re, -im}; }
    bool operator==(const CRat& o) const { return re == o.re && im == o.im; }
    bool operator!=(const CRat& o) const { return !(*this == o); }
    bool operator<(const CRat& o) const {
        if (re != o.re) return re < o.re;
        return im < o.im;
    }
    bool is_zero() const { return re == 0 && im == 0; }

    std::complex<double> value() const { return {to_double(re), to_double(im)}; }
};

inline CRat ipow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return CRat{1};
        case 1: return CRat::i();
        case 2: return CRat{-1};
        default: return -CRat::i();
    }
}

// Floor of the square root of a non-negative integer.
inline long long isqrt(long long v) {
    if (v < 0) throw std::domain_error("isqrt: negative argument");
    if (v == 0) return 0;
    auto r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

inline long long ll_pow(long long base, int exp) {
    if (exp < 0) throw std::domain_error("ll_pow: negative exponent");
    long long r = 1;
    for (int k = 0; k < exp; ++k) r *= base;
    return r;
}

inline Rat rat_pow(const Rat& base, int exp) {
    if (exp >= 0) return Rat(ll_pow(base.numerator(), exp), ll_pow(base.denominator(), exp));
    if (base == 0) throw std::domain_error("rat_pow: zero to negative power");
    return Rat(ll_pow(base.denominator(), -exp), ll_pow(base.numerator(), -exp));
}

inline long long factorial(int n) {
    if (n < 0) throw std::domain_error("factorial: negative argument");
    long long r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

inline long long binomial(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (long long j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

inline std::string rat_to_string(const Rat& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

// Parses "a", "-a", or "a/b".
inline Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(std::stoll(s));
        long long num = std::stoll(s.substr(0, slash));
        long long den = std::stoll(s.substr(slash + 1));
        return Rat(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational number: '" + s + "'");
    }
}

}  // namespace feyncat

#endif  // FEYNCAT_RATIONAL_HPP
