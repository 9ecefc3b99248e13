#pragma once

// Hastings-McLeod solution of Painleve II (q'' = s q + 2 q^3, q ~ Ai at
// +infinity) and the Tracy-Widom distribution functions F1, F2 built from
// its tail integrals.
//
// The ODE is integrated leftward from s_max by a Taylor-series method: the
// right-hand side is polynomial, so the Taylor coefficients at each step
// follow from a cubic-convolution recurrence. Everything is propagated in
// double-double because the solution is a separatrix; absolute errors
// injected near s_max are amplified by roughly exp(2/3 s_max^{3/2} +
// 2^{1/2} 2/3 |s_min|^{3/2}) on the way to s_min, which exhausts plain
// doubles well before s = -10.

#include <algorithm>
#include <cmath>
#include <vector>

#include "aseplab/airy.hpp"
#include "aseplab/dd.hpp"
#include "aseplab/errors.hpp"
#include "aseplab/gauss_legendre.hpp"

namespace aseplab {

class HastingsMcLeod {
  public:
    struct Options {
        double s_min = -10.0;
        double s_max = 12.0;
        int order = 32;           // Taylor order per step
        double tol = 1e-27;       // local truncation target (dd regime)
        double grid_step = 0.01;  // sampling grid spacing
    };

    HastingsMcLeod() : HastingsMcLeod(Options()) {}

    explicit HastingsMcLeod(Options opt) : opt_(opt) {
        if (opt.s_max < 6.0) throw precondition_error("s_max must be >= 6");
        if (opt.s_min < -12.0)
            throw precondition_error("s_min below -12 exceeds the documented accuracy range");
        if (opt.s_min >= opt.s_max) throw precondition_error("empty interval");
        integrate();
        build_tails();
        sample_grid();
    }

    double s_min() const { return opt_.s_min; }
    double s_max() const { return opt_.s_max; }

    // Descending sample grid with q and q' values.
    const std::vector<double>& grid() const { return grid_s_; }
    const std::vector<double>& q_values() const { return grid_q_; }
    const std::vector<double>& q_prime_values() const { return grid_qp_; }

    double q(double s) const { return eval(s).first; }
    double q_prime(double s) const { return eval(s).second; }

    // F2(s) = exp(-int_s^inf (x-s) q(x)^2 dx)
    double f2_cdf(double s) const {
        if (s >= opt_.s_max) return std::exp(-to_double(airy_tail_weighted(s)));
        if (s < opt_.s_min) {
            // linear-in-log continuation below the grid
            const double l0 = log_f2(opt_.s_min);
            const double l1 = log_f2(opt_.s_min + 0.01);
            return std::exp(l0 + (s - opt_.s_min) * (l1 - l0) / 0.01);
        }
        return std::exp(log_f2(s));
    }

    // F1(s) = exp(-1/2 int_s^inf q) sqrt(F2(s))
    double f1_cdf(double s) const {
        if (s >= opt_.s_max)
            return std::exp(-0.5 * to_double(airy_tail_plain(s))) * std::sqrt(f2_cdf(s));
        if (s < opt_.s_min) {
            const double l0 = log_f1(opt_.s_min);
            const double l1 = log_f1(opt_.s_min + 0.01);
            return std::exp(l0 + (s - opt_.s_min) * (l1 - l0) / 0.01);
        }
        return std::exp(log_f1(s));
    }

    bool tail_extrapolated(double s) const { return s >= opt_.s_max || s < opt_.s_min; }

  private:
    struct Piece {
        double s_top;             // expansion point; piece covers [s_top - h, s_top]
        double h;
        std::vector<dd> a;        // Taylor coefficients of q in u = s - s_top
        std::vector<dd> sq;       // coefficients of q^2
        // tail integrals from s_top up to s_max
        dd cum_q;
        dd cum_q2;
        dd cum_xq2;
    };

    Options opt_;
    std::vector<Piece> pieces_;  // descending s_top
    dd tail_q_inf_;              // int_{s_max}^inf Ai
    dd tail_q2_inf_;             // int_{s_max}^inf Ai^2
    dd tail_xq2_inf_;            // int_{s_max}^inf (x - s_max) Ai^2
    std::vector<double> grid_s_, grid_q_, grid_qp_;

    static std::vector<dd> taylor_coeffs(double s0, dd q0, dd q1, int order) {
        const auto n = static_cast<std::size_t>(order);
        std::vector<dd> a(n), b(n), c(n);
        a[0] = q0;
        a[1] = q1;
        for (int k = 0; k + 2 < order; ++k) {
            dd bk(0.0);
            for (int i = 0; i <= k; ++i) bk += a[std::size_t(i)] * a[std::size_t(k - i)];
            b[std::size_t(k)] = bk;
            dd ck(0.0);
            for (int i = 0; i <= k; ++i) ck += b[std::size_t(i)] * a[std::size_t(k - i)];
            c[std::size_t(k)] = ck;
            dd rhs = dd(s0) * a[std::size_t(k)] + 2.0 * ck;
            if (k >= 1) rhs += a[std::size_t(k - 1)];
            a[std::size_t(k + 2)] = rhs / dd(double(k + 1) * double(k + 2));
        }
        return a;
    }

    static dd horner(const std::vector<dd>& a, dd u) {
        dd v(0.0);
        for (std::size_t k = a.size(); k-- > 0;) v = v * u + a[k];
        return v;
    }

    static dd horner_derivative(const std::vector<dd>& a, dd u) {
        dd v(0.0);
        for (std::size_t k = a.size(); k-- > 1;) v = v * u + a[k] * double(k);
        return v;
    }

    void integrate() {
        const int K = opt_.order;
        double s = opt_.s_max;
        const AiryPair init = airy_dd(dd(s));
        dd q0 = init.ai, q1 = init.aip;
        while (s > opt_.s_min) {
            Piece piece;
            piece.s_top = s;
            piece.a = taylor_coeffs(s, q0, q1, K);
            const double scale =
                std::max({std::fabs(q0.hi), std::fabs(q1.hi), 1e-13});
            double h = std::min(0.25, s - opt_.s_min);
            auto tail_est = [&](double hh) {
                return std::fabs(piece.a[std::size_t(K - 1)].hi) * std::pow(hh, K - 1) +
                       std::fabs(piece.a[std::size_t(K - 2)].hi) * std::pow(hh, K - 2);
            };
            while (tail_est(h) > opt_.tol * scale && h > 1e-6) h *= 0.75;
            if (h <= 1e-6)
                throw convergence_error("Taylor step underflow near s = " + std::to_string(s));
            piece.h = h;
            // q^2 coefficients for the tail integrals
            piece.sq.assign(std::size_t(2 * K - 1), dd(0.0));
            for (int i = 0; i < K; ++i)
                for (int j = 0; j < K; ++j)
                    piece.sq[std::size_t(i + j)] += piece.a[std::size_t(i)] * piece.a[std::size_t(j)];
            pieces_.push_back(std::move(piece));
            const dd u(-h);
            q0 = horner(pieces_.back().a, u);
            q1 = horner_derivative(pieces_.back().a, u);
            if (!(q0.hi > 0.0))
                throw convergence_error("positivity of the Hastings-McLeod branch lost");
            s -= h;
        }
    }

    // int over [s_top - h, s_top] of q, q^2, u q^2 from the coefficients.
    static dd piece_int(const std::vector<dd>& coeff, double h, int shift = 0) {
        // int_{-h}^{0} u^{shift} c(u) du = -sum c_k (-h)^{k+shift+1}/(k+shift+1)
        dd total(0.0);
        const dd mh(-h);
        dd upow = pow_int(mh, shift + 1);
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            total -= coeff[k] * upow / dd(double(k) + shift + 1.0);
            upow = upow * mh;
        }
        return total;
    }

    void build_tails() {
        // Airy tail contributions beyond s_max (tiny; kept for exactness of
        // queries at or beyond the right end).
        tail_q_inf_ = airy_quad(1, opt_.s_max);
        tail_q2_inf_ = airy_quad(2, opt_.s_max);
        tail_xq2_inf_ = airy_quad(3, opt_.s_max);
        dd cq = tail_q_inf_;
        dd cq2 = tail_q2_inf_;
        dd cxq2 = tail_xq2_inf_ + dd(opt_.s_max) * tail_q2_inf_;
        for (auto& piece : pieces_) {
            piece.cum_q = cq;
            piece.cum_q2 = cq2;
            piece.cum_xq2 = cxq2;
            cq += piece_int(piece.a, piece.h);
            cq2 += piece_int(piece.sq, piece.h);
            cxq2 += dd(piece.s_top) * piece_int(piece.sq, piece.h) + piece_int(piece.sq, piece.h, 1);
        }
    }

    // int_{z}^{inf} of Ai, Ai^2 or (x-z) Ai^2, by Gauss-Legendre panels.
    static dd airy_quad(int which, double z) {
        static const GaussLegendre gl(48);
        dd total(0.0);
        const double width = 4.0;
        for (int panel = 0; panel < 8; ++panel) {
            const double a = z + width * panel, b = a + width;
            dd acc(0.0);
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                const double xx = 0.5 * (b - a) * gl.x[i] + 0.5 * (a + b);
                const AiryPair ap = airy_dd(dd(xx));
                dd f = which == 1 ? ap.ai : sqr(ap.ai);
                if (which == 3) f = f * dd(xx - z);
                acc += f * gl.w[i];
            }
            total += acc * dd(0.5 * (b - a));
        }
        return total;
    }

    const Piece& locate(double s) const {
        // pieces_ descending by s_top; find first piece with s >= s_top - h
        std::size_t lo = 0, hi = pieces_.size();
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (s <= pieces_[mid].s_top)
                lo = mid;
            else
                hi = mid;
        }
        return pieces_[lo];
    }

    std::pair<double, double> eval(double s) const {
        if (s > opt_.s_max) {
            const AiryPair ap = airy_dd(dd(s));
            return {ap.ai.hi, ap.aip.hi};
        }
        if (s < opt_.s_min) throw precondition_error("s below solved range");
        const Piece& piece = locate(s);
        const dd u(s - piece.s_top);
        return {to_double(horner(piece.a, u)), to_double(horner_derivative(piece.a, u))};
    }

    double log_f2(double s) const {
        const Piece& piece = locate(s);
        const dd u(s - piece.s_top);
        const dd pq2 = piece_partial(piece.sq, u);
        const dd pxq2 = dd(piece.s_top) * pq2 + piece_partial_weighted(piece.sq, u);
        const dd A = piece.cum_q2 + pq2;
        const dd B = piece.cum_xq2 + pxq2;
        return -to_double(B - dd(s) * A);
    }

    double log_f1(double s) const {
        const Piece& piece = locate(s);
        const dd u(s - piece.s_top);
        const dd C = piece.cum_q + piece_partial(piece.a, u);
        return -0.5 * to_double(C) + 0.5 * log_f2(s);
    }

    // int_{u}^{0} c(v) dv and int_{u}^{0} v c(v) dv
    static dd piece_partial(const std::vector<dd>& coeff, dd u) {
        dd total(0.0);
        dd upow = u;
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            total -= coeff[k] * upow / dd(double(k) + 1.0);
            upow = upow * u;
        }
        return total;
    }
    static dd piece_partial_weighted(const std::vector<dd>& coeff, dd u) {
        dd total(0.0);
        dd upow = sqr(u);
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            total -= coeff[k] * upow / dd(double(k) + 2.0);
            upow = upow * u;
        }
        return total;
    }

    // int_s^inf (x - s) Ai^2 and int_s^inf Ai for s >= s_max
    dd airy_tail_weighted(double s) const { return airy_quad(3, s); }
    dd airy_tail_plain(double s) const { return airy_quad(1, s); }

    void sample_grid() {
        const int n = int(std::round((opt_.s_max - opt_.s_min) / opt_.grid_step));
        grid_s_.reserve(std::size_t(n) + 1);
        for (int i = 0; i <= n; ++i) {
            const double s = opt_.s_max - opt_.grid_step * i;
            const auto [qv, qpv] = eval(std::max(s, opt_.s_min));
            grid_s_.push_back(s);
            grid_q_.push_back(qv);
            grid_qp_.push_back(qpv);
        }
    }
};

}  // namespace aseplab
