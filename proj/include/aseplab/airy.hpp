#pragma once

// Airy function Ai and its derivative. The Maclaurin series is summed in
// double-double, which absorbs the cancellation on [-12, 8.5]; outside that
// range the large-argument expansions are already at or below dd rounding.
// The crossover at +8.5 keeps both branches under ~5e-15 relative error in
// double; the dd result near the crossover is what the Painleve II shooting
// consumes, where absolute (not relative) error is what matters.

#include <cmath>

#include "aseplab/dd.hpp"

namespace aseplab {

struct AiryPair {
    dd ai;
    dd aip;
};

namespace detail {

// Ai(0) and Ai'(0) to dd precision.
inline constexpr dd kAi0{0.3550280538878172, 2.05233632436212e-17};
inline constexpr dd kAip0{-0.2588194037928068, 2.522243111610832e-17};

inline AiryPair airy_maclaurin(dd x) {
    // y'' = x y  =>  a_m = a_{m-3} / (m (m-1)); two families seeded by
    // (Ai(0), Ai'(0)). Derivative series are run with their own term
    // recurrences so x = 0 needs no special casing.
    const dd x2 = sqr(x);
    const dd x3 = x * x2;
    dd f = dd(1.0), g = x;
    dd tf = dd(1.0), tg = x;
    dd fp = dd(0.0), gp = dd(1.0);
    dd tfp = dd(0.5) * x2, tgp = dd(1.0);
    fp += tfp;
    for (int k = 1; k < 160; ++k) {
        const double a = 3.0 * k;
        tf = tf * x3 / dd(a * (a - 1.0));
        tg = tg * x3 / dd((a + 1.0) * a);
        f += tf;
        g += tg;
        if (k >= 2) {
            tfp = tfp * x3 / dd((a - 3.0) * (a - 1.0));
            fp += tfp;
        }
        tgp = tgp * x3 / dd((a - 2.0) * a);
        gp += tgp;
        if (std::fabs(tf.hi) < 1e-40 && std::fabs(tg.hi) < 1e-40) break;
    }
    return {kAi0 * f + kAip0 * g, kAi0 * fp + kAip0 * gp};
}

// u_k of the large-argument expansions; v_k = u_k (6k+1)/(1-6k).
inline dd asy_u(int k, dd prev) {
    return prev * dd((6.0 * k - 5.0) * (6.0 * k - 1.0)) / dd(72.0 * k);
}

inline AiryPair airy_asymptotic_pos(dd x) {
    const dd sx = sqrt(x);
    const dd zeta = dd(2.0) / dd(3.0) * x * sx;
    const dd inv_zeta = dd(1.0) / zeta;
    dd u = dd(1.0), su = dd(1.0), sv = dd(1.0);
    dd zk = dd(1.0);
    double last = 1.0;
    for (int k = 1; k < 80; ++k) {
        u = asy_u(k, u);
        zk = zk * inv_zeta;
        const dd tu = u * zk;
        if (std::fabs(tu.hi) > last) break;  // divergence onset
        last = std::fabs(tu.hi);
        const dd tv = tu * dd(6.0 * k + 1.0) / dd(1.0 - 6.0 * k);
        if (k & 1) {
            su -= tu;
            sv -= tv;
        } else {
            su += tu;
            sv += tv;
        }
        if (last < 1e-40) break;
    }
    const dd emz = exp(-zeta);
    const dd pref = dd(0.5) * ddc::inv_sqrt_pi * emz;
    const dd x14 = sqrt(sx);
    return {pref / x14 * su, -pref * x14 * sv};
}

inline AiryPair airy_asymptotic_neg(dd x) {
    const dd z = -x;
    const dd sz = sqrt(z);
    const dd zeta = dd(2.0) / dd(3.0) * z * sz;
    const dd inv_zeta = dd(1.0) / zeta;
    // Split Sum (-1)^k u_k zeta^-k into even/odd parts P, Q (and R, S for
    // the derivative weights v_k).
    dd P = dd(1.0), Q = dd(0.0), R = dd(1.0), S = dd(0.0);
    dd u = dd(1.0), zk = dd(1.0);
    double last = 1.0;
    for (int k = 1; k < 80; ++k) {
        u = asy_u(k, u);
        zk = zk * inv_zeta;
        const dd tu = u * zk;
        if (std::fabs(tu.hi) > last) break;
        last = std::fabs(tu.hi);
        const dd tv = tu * dd(6.0 * k + 1.0) / dd(1.0 - 6.0 * k);
        const int m = k / 2;
        const double sign = (m & 1) ? -1.0 : 1.0;
        if (k & 1) {
            Q += tu * sign;
            S += tv * sign;
        } else {
            P += tu * sign;
            R += tv * sign;
        }
        if (last < 1e-40) break;
    }
    dd sn, cn;
    sincos(zeta - ddc::pi * dd(0.25), sn, cn);
    const dd x14 = sqrt(sz);
    const dd pref = ddc::inv_sqrt_pi;
    return {pref / x14 * (cn * P + sn * Q), pref * x14 * (sn * R - cn * S)};
}

}  // namespace detail

inline AiryPair airy_dd(dd x) {
    if (x.hi >= 8.5) return detail::airy_asymptotic_pos(x);
    if (x.hi <= -12.0) return detail::airy_asymptotic_neg(x);
    return detail::airy_maclaurin(x);
}

inline double airy_ai(double x) { return airy_dd(dd(x)).ai.hi; }
inline double airy_ai_prime(double x) { return airy_dd(dd(x)).aip.hi; }

}  // namespace aseplab
