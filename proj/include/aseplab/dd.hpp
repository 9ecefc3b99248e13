#pragma once

// Double-double ("dd") arithmetic: an unevaluated sum of two doubles giving
// roughly 32 significant decimal digits.  Used where plain double precision
// is insufficient: small-contour permutation sums with large negative
// exponents, and the leftward Painleve II integration, both of which lose
// 15+ digits to cancellation.
//
// The error-free transformations (two_sum, two_prod) follow Dekker/Knuth;
// the composite operations follow the QD library of Hida, Li and Bailey.
// Requires strict IEEE double semantics (no -ffast-math).

#include <cmath>
#include <cstdint>
#include <limits>

namespace aseplab {

namespace detail {

inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double bb = s - a;
    e = (a - (s - bb)) + (b - bb);
}

// Assumes |a| >= |b|.
inline void quick_two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    e = b - (s - a);
}

inline void two_prod(double a, double b, double& p, double& e) {
    p = a * b;
    e = std::fma(a, b, -p);
}

}  // namespace detail

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    constexpr dd() = default;
    constexpr dd(double h) : hi(h), lo(0.0) {}
    constexpr dd(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi; }

    friend dd operator+(dd a, dd b) {
        double s1, s2, t1, t2;
        detail::two_sum(a.hi, b.hi, s1, s2);
        detail::two_sum(a.lo, b.lo, t1, t2);
        s2 += t1;
        detail::quick_two_sum(s1, s2, s1, s2);
        s2 += t2;
        detail::quick_two_sum(s1, s2, s1, s2);
        return {s1, s2};
    }

    friend dd operator+(dd a, double b) {
        double s1, s2;
        detail::two_sum(a.hi, b, s1, s2);
        s2 += a.lo;
        detail::quick_two_sum(s1, s2, s1, s2);
        return {s1, s2};
    }
    friend dd operator+(double a, dd b) { return b + a; }

    friend dd operator-(dd a) { return {-a.hi, -a.lo}; }
    friend dd operator-(dd a, dd b) { return a + (-b); }
    friend dd operator-(dd a, double b) { return a + (-b); }
    friend dd operator-(double a, dd b) { return dd(a) + (-b); }

    friend dd operator*(dd a, dd b) {
        double p1, p2;
        detail::two_prod(a.hi, b.hi, p1, p2);
        p2 += a.hi * b.lo + a.lo * b.hi;
        detail::quick_two_sum(p1, p2, p1, p2);
        return {p1, p2};
    }

    friend dd operator*(dd a, double b) {
        double p1, p2;
        detail::two_prod(a.hi, b, p1, p2);
        p2 += a.lo * b;
        detail::quick_two_sum(p1, p2, p1, p2);
        return {p1, p2};
    }
    friend dd operator*(double a, dd b) { return b * a; }

    friend dd operator/(dd a, dd b) {
        const double q1 = a.hi / b.hi;
        dd r = a - b * q1;
        const double q2 = r.hi / b.hi;
        r = r - b * q2;
        const double q3 = r.hi / b.hi;
        double s1, s2;
        detail::quick_two_sum(q1, q2, s1, s2);
        return dd(s1, s2) + q3;
    }
    friend dd operator/(dd a, double b) { return a / dd(b); }
    friend dd operator/(double a, dd b) { return dd(a) / b; }

    dd& operator+=(dd o) { *this = *this + o; return *this; }
    dd& operator-=(dd o) { *this = *this - o; return *this; }
    dd& operator*=(dd o) { *this = *this * o; return *this; }
    dd& operator/=(dd o) { *this = *this / o; return *this; }

    friend bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
    friend bool operator>(dd a, dd b) { return b < a; }
    friend bool operator<=(dd a, dd b) { return !(b < a); }
    friend bool operator>=(dd a, dd b) { return !(a < b); }
    friend bool operator==(dd a, dd b) { return a.hi == b.hi && a.lo == b.lo; }
};

inline double to_double(dd a) { return a.hi; }
inline double to_double(double a) { return a; }

inline dd fabs(dd a) { return a.hi < 0.0 ? -a : a; }

inline dd ldexp(dd a, int n) { return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)}; }

inline dd sqr(dd a) {
    double p1, p2;
    detail::two_prod(a.hi, a.hi, p1, p2);
    p2 += 2.0 * a.hi * a.lo;
    detail::quick_two_sum(p1, p2, p1, p2);
    return {p1, p2};
}

inline dd sqrt(dd a) {
    if (a.hi == 0.0) return dd(0.0);
    const double x = 1.0 / std::sqrt(a.hi);
    const double ax = a.hi * x;
    const dd err = a - sqr(dd(ax));
    return dd(ax) + err.hi * (x * 0.5);
}

namespace ddc {
// hi/lo splits of transcendental constants (36+ digit values).
inline constexpr dd pi{3.141592653589793, 1.2246467991473532e-16};
inline constexpr dd two_pi{6.283185307179586, 2.4492935982947064e-16};
inline constexpr dd half_pi{1.5707963267948966, 6.123233995736766e-17};
inline constexpr dd ln2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr dd inv_sqrt_pi{0.5641895835477563, 7.66772980658294e-18};
inline constexpr double eps = 4.93e-32;  // 2^-104
}  // namespace ddc

// exp by 2^k * e^r, r reduced into [-ln2/2, ln2/2] then scaled down by 512
// for a fast Taylor sum and squared back up.
inline dd exp(dd a) {
    if (a.hi <= -709.0) return dd(0.0);
    if (a.hi >= 709.0) return dd(std::numeric_limits<double>::infinity());
    const double k = std::round(a.hi / ddc::ln2.hi);
    dd r = a - ddc::ln2 * k;
    r = ldexp(r, -9);  // /512
    dd sum = dd(1.0) + r;
    dd term = r;
    for (int i = 2; i < 20; ++i) {
        term = term * r / double(i);
        sum += term;
        if (std::fabs(term.hi) < 1e-35 * std::fabs(sum.hi)) break;
    }
    for (int i = 0; i < 9; ++i) sum = sqr(sum);
    return ldexp(sum, int(k));
}

inline dd log(dd a) {
    // Newton refinement of double log: x1 = x0 + a*exp(-x0) - 1, twice.
    dd x = dd(std::log(a.hi));
    x = x + a * exp(-x) - 1.0;
    x = x + a * exp(-x) - 1.0;
    return x;
}

namespace detail {

// sin/cos Taylor sums for |x| <= pi/4.
inline void sincos_taylor(dd x, dd& s, dd& c) {
    const dd x2 = sqr(x);
    dd term = x;
    dd sum = x;
    for (int i = 1; i < 20; ++i) {
        term = term * x2 / double((2 * i) * (2 * i + 1));
        sum = (i & 1) ? sum - term : sum + term;
        if (std::fabs(term.hi) < 1e-35) break;
    }
    s = sum;
    term = dd(1.0);
    sum = dd(1.0);
    for (int i = 1; i < 20; ++i) {
        term = term * x2 / double((2 * i - 1) * (2 * i));
        sum = (i & 1) ? sum - term : sum + term;
        if (std::fabs(term.hi) < 1e-35) break;
    }
    c = sum;
}

inline void sincos_from_quadrant(long quadrant, dd s0, dd c0, dd& s, dd& c) {
    switch (quadrant & 3) {
        case 0: s = s0;  c = c0;  break;
        case 1: s = c0;  c = -s0; break;
        case 2: s = -s0; c = -c0; break;
        default: s = -c0; c = s0; break;
    }
}

}  // namespace detail

// Simultaneous sin/cos; accurate for |a| up to ~1e6 (reduction by pi/2).
inline void sincos(dd a, dd& s, dd& c) {
    const double k = std::round(a.hi / ddc::half_pi.hi);
    const dd r = a - ddc::half_pi * k;
    dd s0, c0;
    detail::sincos_taylor(r, s0, c0);
    detail::sincos_from_quadrant(long(k), s0, c0, s, c);
}

inline dd sin(dd a) { dd s, c; sincos(a, s, c); return s; }
inline dd cos(dd a) { dd s, c; sincos(a, s, c); return c; }

// sin(pi*a), cos(pi*a). The argument is reduced modulo 2 before the
// multiplication by pi, so rational a = j/n loses nothing to roundoff.
inline void sincospi(dd a, dd& s, dd& c) {
    const double k2 = 2.0 * std::round(a.hi / 2.0);
    dd u = a - k2;                               // u in [-1, 1]
    const double q = std::round(2.0 * u.hi) / 2.0;  // nearest multiple of 1/2
    u = u - q;                                   // |u| <= 1/4
    dd s0, c0;
    detail::sincos_taylor(ddc::pi * u, s0, c0);
    detail::sincos_from_quadrant(long(2.0 * q), s0, c0, s, c);
}

inline dd pow_int(dd base, long e) {
    if (e == 0) return dd(1.0);
    bool inv = e < 0;
    unsigned long n = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    dd acc(1.0), b = base;
    while (n) {
        if (n & 1) acc *= b;
        b = sqr(b);
        n >>= 1;
    }
    return inv ? dd(1.0) / acc : acc;
}

// ---------------------------------------------------------------------------
// Minimal complex type usable with both double and dd scalars.

template <class T>
struct cplx {
    T re{};
    T im{};

    cplx() = default;
    cplx(T r) : re(r) {}
    cplx(T r, T i) : re(r), im(i) {}

    friend cplx operator+(cplx a, cplx b) { return {a.re + b.re, a.im + b.im}; }
    friend cplx operator-(cplx a, cplx b) { return {a.re - b.re, a.im - b.im}; }
    friend cplx operator-(cplx a) { return {-a.re, -a.im}; }
    friend cplx operator*(cplx a, cplx b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend cplx operator*(cplx a, T b) { return {a.re * b, a.im * b}; }
    friend cplx operator*(T a, cplx b) { return b * a; }
    friend cplx operator/(cplx a, cplx b) {
        const T d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    friend cplx operator/(cplx a, T b) { return {a.re / b, a.im / b}; }

    cplx& operator+=(cplx o) { *this = *this + o; return *this; }
    cplx& operator-=(cplx o) { *this = *this - o; return *this; }
    cplx& operator*=(cplx o) { *this = *this * o; return *this; }
};

using cdd = cplx<dd>;

inline dd norm(cdd z) { return z.re * z.re + z.im * z.im; }
inline dd abs(cdd z) { return sqrt(norm(z)); }
inline cdd conj(cdd z) { return {z.re, -z.im}; }

inline cdd exp(cdd z) {
    const dd m = exp(z.re);
    dd s, c;
    sincos(z.im, s, c);
    return {m * c, m * s};
}

// z^e for integer e via |z|, arg decomposition is avoided; plain binary
// exponentiation keeps everything in dd.
inline cdd pow_int(cdd base, long e) {
    if (e == 0) return cdd(dd(1.0));
    bool inv = e < 0;
    unsigned long n = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    cdd acc(dd(1.0)), b = base;
    while (n) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    return inv ? cdd(dd(1.0)) / acc : acc;
}

inline cplx<double> to_double(cdd z) { return {z.re.hi, z.im.hi}; }

}  // namespace aseplab
