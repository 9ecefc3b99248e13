#pragma once

// Exact N-particle transition probabilities of the asymmetric exclusion
// process as a permutation sum of contour integrals over a small circle,
// with S-matrix amplitudes attached to permutation inversions.
//
// Numerics: equispaced trapezoid nodes on the circle (spectrally accurate
// for these integrands), evaluated in double-double. The small radius makes
// xi^{x-y-1} factors huge for displaced configurations while the integral
// itself is tiny, so plain doubles lose the far field to cancellation; dd
// keeps absolute errors near 1e-18 across the window of configurations a
// finite-time run can reach.
//
// The batch evaluator computes the whole window at once: for each
// permutation the node tensor is assembled once and a radix-2 FFT along
// each axis extracts every Laurent coefficient (= every target position)
// simultaneously.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "aseplab/dd.hpp"
#include "aseplab/errors.hpp"
#include "aseplab/hopping_rates.hpp"

namespace aseplab {

namespace detail {
template <class T>
T norm_helper(const cplx<T>& z) { return z.re * z.re + z.im * z.im; }
}  // namespace detail

inline double norm_of(const cplx<double>& z) { return detail::norm_helper(z); }
inline dd norm_of(const cplx<dd>& z) { return detail::norm_helper(z); }

// eps(xi) = p/xi + q xi - 1
template <class T>
cplx<T> bethe_epsilon(const cplx<T>& xi, const HoppingRates& rates) {
    return cplx<T>(T(rates.p())) / xi + cplx<T>(T(rates.q())) * xi - cplx<T>(T(1.0));
}

inline cplx<double> bethe_epsilon(const cplx<double>& xi, const HoppingRates& rates) {
    if (xi.re == 0.0 && xi.im == 0.0) throw precondition_error("epsilon undefined at xi = 0");
    return bethe_epsilon<double>(xi, rates);
}

// S(a, b) = -(p + q a b - a) / (p + q a b - b)
template <class T>
cplx<T> bethe_s_factor(const cplx<T>& a, const cplx<T>& b, const HoppingRates& rates) {
    const cplx<T> qab = cplx<T>(T(rates.q())) * a * b;
    const cplx<T> num = cplx<T>(T(rates.p())) + qab - a;
    const cplx<T> den = cplx<T>(T(rates.p())) + qab - b;
    const double scale = rates.p() + std::sqrt(to_double(norm_of(qab))) +
                         std::sqrt(to_double(norm_of(b)));
    if (std::sqrt(to_double(norm_of(den))) < 1e-12 * scale)
        throw convergence_error("S-matrix pole: contour radius too close to a singularity");
    return -num / den;
}

// Radius below which every S-factor pole stays outside the circle:
// r (1 + q r) < p, i.e. r < (-1 + sqrt(1 + 4 p q)) / (2 q).
inline double small_contour_pole_radius(const HoppingRates& rates) {
    const double p = rates.p(), q = rates.q();
    if (q == 0.0) return p;
    return (-1.0 + std::sqrt(1.0 + 4.0 * p * q)) / (2.0 * q);
}

// Discretized circle |xi| = radius with equispaced nodes. All contour
// weights fold in the 1/(2 pi i) convention: w_j = xi_j / nodes.
struct ContourQuadrature {
    double radius;
    int nodes;
    std::vector<cplx<double>> xi;

    ContourQuadrature(double radius_, int nodes_) : radius(radius_), nodes(nodes_) {
        if (nodes < 16 || nodes % 2 != 0)
            throw precondition_error("contour quadrature needs an even node count >= 16");
        if (!(radius > 0.0)) throw precondition_error("contour radius must be positive");
        xi.resize(std::size_t(nodes));
        for (int j = 0; j < nodes; ++j) {
            dd s, c;
            sincospi(dd(2.0 * j) / dd(double(nodes)), s, c);
            xi[std::size_t(j)] = {radius * c.hi, radius * s.hi};
        }
    }

    // Smallest |p + q xi xi' - xi'| over the node grid; the transition
    // formula requires this bounded away from zero.
    double pole_margin(const HoppingRates& rates) const {
        const double p = rates.p(), q = rates.q();
        double m = std::numeric_limits<double>::max();
        for (const auto& a : xi)
            for (const auto& b : xi) {
                const cplx<double> den = cplx<double>(p) + cplx<double>(q) * a * b - b;
                m = std::min(m, std::sqrt(norm_of(den)));
            }
        return m;
    }

    void require_pole_safe(const HoppingRates& rates) const {
        // analytic bound first (cheap and node-independent)
        if (radius >= small_contour_pole_radius(rates) - 1e-12)
            throw precondition_error("contour radius violates the pole condition");
        if (pole_margin(rates) < 1e-6)
            throw precondition_error("contour nodes approach an S-matrix pole");
    }

    // Spec-form default min(1/2, p/2q) capped into the provably pole-free
    // range (the uncapped form crosses poles for nearly symmetric rates).
    static double default_radius(const HoppingRates& rates) {
        const double cap = 0.55 * small_contour_pole_radius(rates);
        if (rates.q() == 0.0) return std::min(0.5, cap);
        return std::min({0.5, rates.p() / (2.0 * rates.q()), cap});
    }
};

struct BetheOptions {
    double radius = 0.0;   // 0 = automatic
    int min_nodes = 32;
    int max_nodes = 512;
    double conv_tol = 1e-12;  // node-doubling stop
    double imag_tol = 1e-9;   // residual imaginary part allowed
    int n_max = 6;            // particle-count cap (N! terms, nodes^N work)
};

namespace detail {

inline void validate_config(const std::vector<int>& c, const char* name) {
    if (c.empty()) throw precondition_error(std::string(name) + " must be nonempty");
    for (std::size_t i = 1; i < c.size(); ++i)
        if (c[i] <= c[i - 1])
            throw precondition_error(std::string(name) + " must be strictly increasing");
}

// In-place radix-2 FFT (sign = +1: kernel omega^{+jk}), dd precision.
inline void fft_pow2(std::vector<cdd>& a, const std::vector<cdd>& twiddle) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cdd w = twiddle[k * step];
                const cdd u = a[i + k];
                const cdd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

inline std::vector<cdd> fft_twiddles(std::size_t n) {
    std::vector<cdd> tw(n);
    for (std::size_t k = 0; k < n; ++k) {
        dd s, c;
        sincospi(dd(2.0 * double(k)) / dd(double(n)), s, c);
        tw[k] = {c, s};  // omega^{+k}
    }
    return tw;
}

struct NodeData {
    int n = 0;
    double r = 0.0;
    std::vector<cdd> xi;
    std::vector<cdd> smat;            // S(xi_a, xi_b), row-major a*n+b
    std::vector<std::vector<cdd>> base;  // per variable k: w_j e^{t eps} xi^{-y_k-1}
};

inline NodeData make_nodes(const std::vector<int>& y, double t, const HoppingRates& rates,
                           double r, int n) {
    NodeData nd;
    nd.n = n;
    nd.r = r;
    nd.xi.resize(std::size_t(n));
    const dd rd(r);
    for (int j = 0; j < n; ++j) {
        dd s, c;
        sincospi(dd(2.0 * j) / dd(double(n)), s, c);
        nd.xi[std::size_t(j)] = {rd * c, rd * s};
    }
    const dd p(rates.p()), q(rates.q());
    nd.smat.resize(std::size_t(n) * std::size_t(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const cdd qab = cplx<dd>(q) * nd.xi[std::size_t(a)] * nd.xi[std::size_t(b)];
            const cdd num = cplx<dd>(p) + qab - nd.xi[std::size_t(a)];
            const cdd den = cplx<dd>(p) + qab - nd.xi[std::size_t(b)];
            nd.smat[std::size_t(a) * std::size_t(n) + std::size_t(b)] = -num / den;
        }
    nd.base.resize(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        nd.base[k].resize(std::size_t(n));
        for (int j = 0; j < n; ++j) {
            const cdd& x = nd.xi[std::size_t(j)];
            const cdd eps = cplx<dd>(p) / x + cplx<dd>(q) * x - cplx<dd>(dd(1.0));
            const cdd w = x / dd(double(n));
            nd.base[k][std::size_t(j)] =
                w * exp(eps * dd(t)) * pow_int(x, -long(y[k]) - 1);
        }
    }
    return nd;
}

inline int mod_index(int x, int n) {
    int m = x % n;
    return m < 0 ? m + n : m;
}

}  // namespace detail

// Transition probabilities from initial configuration Y for every position
// tuple inside [w_lo, w_hi]^N, as the analytic continuation u(X; t); the
// probability P_Y(X; t) is u at strictly increasing X.
//
// Conditioning: configurations displaced far against the drift carry large
// negative contour exponents whose trapezoid sums cancel catastrophically.
// Those entries are instead evaluated on the reflected lattice (x -> -x,
// rates swapped), where the same probabilities appear with positive
// exponents. prob() reads the merged table; u() always reads the direct
// orientation and is meant for tuples near the initial configuration.
class TransitionTable {
  public:
    TransitionTable(std::vector<int> y, int w_lo, int w_hi, double t, HoppingRates rates,
                    BetheOptions opt = BetheOptions())
        : y_(std::move(y)), w_lo_(w_lo), w_hi_(w_hi), t_(t), rates_(rates), opt_(opt) {
        detail::validate_config(y_, "Y");
        if (rates_.p() == 0.0)
            throw precondition_error("contour formula requires p != 0");
        if (int(y_.size()) > opt_.n_max)
            throw precondition_error("particle count exceeds configured cap");
        if (t < 0.0) throw precondition_error("time must be nonnegative");
        if (w_hi < w_lo) throw precondition_error("empty window");
        if (int(y_.size()) > 3)
            throw precondition_error("batch tables support up to 3 particles; use "
                                     "transition_probability for larger N");
        radius_ = opt_.radius > 0.0 ? opt_.radius : ContourQuadrature::default_radius(rates_);
        if (radius_ >= small_contour_pole_radius(rates_) - 1e-12)
            throw precondition_error("contour radius violates the pole condition");
        build_hybrid();
    }

    int particle_count() const { return int(y_.size()); }
    const std::vector<int>& initial() const { return y_; }
    int window_lo() const { return w_lo_; }
    int window_hi() const { return w_hi_; }
    double radius() const { return radius_; }
    int nodes_used() const { return nodes_used_; }
    double convergence_change() const { return conv_change_; }
    double max_imag_residual() const { return max_imag_; }

    // Analytic continuation at an arbitrary integer tuple in the window
    // (direct orientation; accurate for tuples not far against the drift).
    double u(const std::vector<int>& x) const {
        return direct_[flat_index(x)];
    }

    // Probability at an ordered configuration (hybrid orientation).
    double prob(const std::vector<int>& x) const {
        detail::validate_config(x, "X");
        return merged_[flat_index(x)];
    }

    // Sum over all ordered configurations in the window.
    double ordered_sum() const {
        const int N = particle_count();
        double total = 0.0;
        std::vector<int> x(static_cast<std::size_t>(N));
        // iterate strictly increasing tuples
        for (int i = 0; i < N; ++i) x[std::size_t(i)] = w_lo_ + i;
        while (true) {
            total += merged_[flat_index(x)];
            int i = N - 1;
            while (i >= 0 && x[std::size_t(i)] == w_hi_ - (N - 1 - i)) --i;
            if (i < 0) break;
            ++x[std::size_t(i)];
            for (int j = i + 1; j < N; ++j) x[std::size_t(j)] = x[std::size_t(j - 1)] + 1;
        }
        return total;
    }

  private:
    std::vector<int> y_;
    int w_lo_, w_hi_;
    double t_;
    HoppingRates rates_;
    BetheOptions opt_;
    double radius_ = 0.0;
    int nodes_used_ = 0;
    double conv_change_ = 0.0;
    double max_imag_ = 0.0;
    std::vector<double> direct_;
    std::vector<double> merged_;

    int width() const { return w_hi_ - w_lo_ + 1; }

    std::size_t flat_index(const std::vector<int>& x) const {
        if (x.size() != y_.size()) throw precondition_error("wrong tuple length");
        std::size_t idx = 0;
        for (int v : x) {
            if (v < w_lo_ || v > w_hi_) throw precondition_error("position outside table window");
            idx = idx * std::size_t(width()) + std::size_t(v - w_lo_);
        }
        return idx;
    }

    static int next_pow2(int v) {
        int n = 1;
        while (n < v) n <<= 1;
        return n;
    }

    // Entries with sum(x) >= sum(y) are well conditioned in a given
    // orientation; convergence and the imaginary-residual check are
    // measured on that region only.
    void build_hybrid() {
        const int N = particle_count(), W = width();
        const int y_sum = std::accumulate(y_.begin(), y_.end(), 0);

        direct_ = build_converged(y_, w_lo_, w_hi_, t_, rates_, radius_, nodes_used_,
                                  conv_change_, max_imag_);
        merged_ = direct_;

        // smallest possible sum(x) in the window
        int min_sum = 0;
        for (int i = 0; i < N; ++i) min_sum += w_lo_ + i;
        if (min_sum >= y_sum) return;  // no against-drift entries

        if (rates_.q() == 0.0) {
            // no left jumps: against-drift configurations are unreachable
            overwrite_left_of(y_sum, [](const std::vector<int>&) { return 0.0; });
            return;
        }

        // reflected process: x -> -x, rates swapped
        std::vector<int> y_ref(y_.rbegin(), y_.rend());
        for (int& v : y_ref) v = -v;
        const HoppingRates rates_ref(rates_.q());
        const double radius_ref = opt_.radius > 0.0
                                      ? opt_.radius
                                      : ContourQuadrature::default_radius(rates_ref);
        int nodes_r = 0;
        double conv_r = 0.0, imag_r = 0.0;
        const std::vector<double> refl = build_converged(y_ref, -w_hi_, -w_lo_, t_, rates_ref,
                                                         radius_ref, nodes_r, conv_r, imag_r);
        max_imag_ = std::max(max_imag_, imag_r);
        conv_change_ = std::max(conv_change_, conv_r);
        nodes_used_ = std::max(nodes_used_, nodes_r);

        const int Wd = W;
        overwrite_left_of(y_sum, [&](const std::vector<int>& x) {
            std::size_t idx = 0;
            for (int i = N - 1; i >= 0; --i) {
                const int v = -x[std::size_t(i)];
                idx = idx * std::size_t(Wd) + std::size_t(v - (-w_hi_));
            }
            return refl[idx];
        });
    }

    // Apply fn to every tuple with sum(x) < y_sum, storing into merged_.
    template <class F>
    void overwrite_left_of(int y_sum, F&& fn) {
        const int N = particle_count(), W = width();
        std::vector<int> x(static_cast<std::size_t>(N), w_lo_);
        std::size_t flat = 0;
        while (true) {
            int s = 0;
            for (int v : x) s += v;
            if (s < y_sum) merged_[flat] = fn(x);
            ++flat;
            int axis = N - 1;
            while (axis >= 0 && ++x[std::size_t(axis)] > w_hi_) {
                x[std::size_t(axis)] = w_lo_;
                --axis;
            }
            if (axis < 0) break;
        }
    }

    std::vector<double> build_converged(const std::vector<int>& y, int w_lo, int w_hi, double t,
                                        const HoppingRates& rates, double radius,
                                        int& nodes_used, double& conv_change,
                                        double& max_imag_out) const {
        const int W = w_hi - w_lo + 1;
        const int y_sum = std::accumulate(y.begin(), y.end(), 0);
        int n = next_pow2(std::max(opt_.min_nodes, W + 1));
        std::vector<double> prev;
        double prev_imag = 0.0;
        while (true) {
            double max_imag = 0.0;
            std::vector<double> cur =
                build_once(y, w_lo, w_hi, t, rates, radius, n, y_sum, max_imag);
            if (!prev.empty()) {
                double change = conditioned_sup_diff(cur, prev, w_lo, w_hi, y_sum);
#ifdef ASEPLAB_DEBUG_CONV
                std::fprintf(stderr, "[conv] N=%d n=%d change=%.3e imag=%.3e\n",
                             particle_count(), n, change, max_imag);
#endif
                if (change < opt_.conv_tol) {
                    nodes_used = n;
                    conv_change = change;
                    max_imag_out = max_imag;
                    if (max_imag > opt_.imag_tol)
                        throw convergence_error("imaginary residual above tolerance");
                    return cur;
                }
            }
            prev = std::move(cur);
            prev_imag = max_imag;
            (void)prev_imag;
            if (n >= opt_.max_nodes)
                throw convergence_error("node doubling did not converge by the cap");
            n *= 2;
        }
    }

    double conditioned_sup_diff(const std::vector<double>& a, const std::vector<double>& b,
                                int w_lo, int w_hi, int y_sum) const {
        const int N = particle_count();
        std::vector<int> x(static_cast<std::size_t>(N), w_lo);
        std::size_t flat = 0;
        double change = 0.0;
        while (true) {
            int s = 0;
            for (int v : x) s += v;
            if (s >= y_sum) change = std::max(change, std::fabs(a[flat] - b[flat]));
            ++flat;
            int axis = N - 1;
            while (axis >= 0 && ++x[std::size_t(axis)] > w_hi) {
                x[std::size_t(axis)] = w_lo;
                --axis;
            }
            if (axis < 0) break;
        }
        return change;
    }

    std::vector<double> build_once(const std::vector<int>& y_cfg, int w_lo, int w_hi, double t,
                                   const HoppingRates& rates, double radius, int n, int y_sum,
                                   double& max_imag) const {
        const int N = particle_count(), W = w_hi - w_lo + 1;
        const auto nd = detail::make_nodes(y_cfg, t, rates, radius, n);
        const auto tw = detail::fft_twiddles(std::size_t(n));

        // radius powers r^x for x in the window (sigma-independent scale)
        std::vector<dd> rpow(static_cast<std::size_t>(W));
        for (int i = 0; i < W; ++i) rpow[std::size_t(i)] = pow_int(dd(radius), w_lo + i);

        std::vector<cdd> acc;  // accumulated table in dd, size W^N
        std::size_t table_size = 1;
        for (int i = 0; i < N; ++i) table_size *= std::size_t(W);
        acc.assign(table_size, cdd{});

        std::vector<int> perm(static_cast<std::size_t>(N));
        std::iota(perm.begin(), perm.end(), 1);
        std::vector<cdd> tensor;
        do {
            assemble_and_transform(nd, tw, perm, tensor);
            // tensor is indexed by exponent class per variable axis; variable
            // k carries the position of particle sigma^{-1}(k).
            std::vector<int> invp(static_cast<std::size_t>(N));
            for (int i = 0; i < N; ++i) invp[std::size_t(perm[std::size_t(i)] - 1)] = i;
            std::vector<std::size_t> pos(std::size_t(N), 0);
            for (std::size_t flat = 0; flat < table_size; ++flat) {
                // decode flat -> particle positions x_1..x_N (x_i ascending axes)
                std::size_t rem = flat;
                for (int i = N - 1; i >= 0; --i) {
                    pos[std::size_t(i)] = rem % std::size_t(W);
                    rem /= std::size_t(W);
                }
                std::size_t src = 0;
                for (int k = 0; k < N; ++k) {
                    const int x_val = w_lo + int(pos[std::size_t(invp[std::size_t(k)])]);
                    src = src * std::size_t(n) + std::size_t(detail::mod_index(x_val, n));
                }
                acc[flat] += tensor[src];
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        std::vector<double> out(table_size);
        max_imag = 0.0;
        for (std::size_t flat = 0; flat < table_size; ++flat) {
            std::size_t rem = flat;
            dd scale(1.0);
            int x_sum = 0;
            for (int i = N - 1; i >= 0; --i) {
                const std::size_t pidx = rem % std::size_t(W);
                scale = scale * rpow[pidx];
                x_sum += w_lo + int(pidx);
                rem /= std::size_t(W);
            }
            const cdd v = acc[flat] * scale;
            out[flat] = to_double(v.re);
            if (x_sum >= y_sum)
                max_imag = std::max(max_imag, std::fabs(to_double(v.im)));
        }
        return out;
    }

    // Build the node tensor for one permutation and FFT every axis.
    void assemble_and_transform(const detail::NodeData& nd, const std::vector<cdd>& tw,
                                const std::vector<int>& perm, std::vector<cdd>& tensor) const {
        const int N = particle_count(), n = nd.n;
        // inversion pairs {alpha, beta} of the permutation, alpha > beta
        std::vector<std::pair<int, int>> inv;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                if (perm[std::size_t(i)] > perm[std::size_t(j)])
                    inv.emplace_back(perm[std::size_t(i)] - 1, perm[std::size_t(j)] - 1);

        std::size_t size = 1;
        for (int i = 0; i < N; ++i) size *= std::size_t(n);
        tensor.assign(size, cdd{});

        std::vector<std::size_t> j(std::size_t(N), 0);
        // explicit nested iteration, general in N (N <= 3 in practice here)
        std::size_t flat = 0;
        while (true) {
            cdd v = nd.base[0][j[0]];
            for (int k = 1; k < N; ++k) v *= nd.base[std::size_t(k)][j[std::size_t(k)]];
            for (const auto& [a, b] : inv)
                v *= nd.smat[j[std::size_t(a)] * std::size_t(n) + j[std::size_t(b)]];
            tensor[flat] = v;
            ++flat;
            int axis = N - 1;
            while (axis >= 0 && ++j[std::size_t(axis)] == std::size_t(n)) {
                j[std::size_t(axis)] = 0;
                --axis;
            }
            if (axis < 0) break;
        }

        // FFT along each axis: result[e] = sum_j tensor[j] omega^{j e}
        std::vector<cdd> line(static_cast<std::size_t>(n));
        for (int axis = N - 1; axis >= 0; --axis) {
            const std::size_t block = [&] {
                std::size_t b = 1;
                for (int k = axis + 1; k < N; ++k) b *= std::size_t(n);
                return b;
            }();
            const std::size_t outer = size / (std::size_t(n) * block);
            for (std::size_t o = 0; o < outer; ++o) {
                for (std::size_t b = 0; b < block; ++b) {
                    const std::size_t base_idx = o * std::size_t(n) * block + b;
                    for (std::size_t k = 0; k < std::size_t(n); ++k)
                        line[k] = tensor[base_idx + k * block];
                    detail::fft_pow2(line, tw);
                    for (std::size_t k = 0; k < std::size_t(n); ++k)
                        tensor[base_idx + k * block] = line[k];
                }
            }
        }
    }
};

namespace detail {
inline double direct_probability(const std::vector<int>& y, const std::vector<int>& x, double t,
                                 const HoppingRates& rates, const BetheOptions& opt);
}  // namespace detail

// Exact distribution over a window: P_Y(X; t) for a single ordered X.
inline double transition_probability(const std::vector<int>& y, const std::vector<int>& x,
                                     double t, const HoppingRates& rates,
                                     BetheOptions opt = BetheOptions()) {
    detail::validate_config(x, "X");
    detail::validate_config(y, "Y");
    if (x.size() != y.size()) throw precondition_error("X and Y must have equal length");
    if (int(y.size()) > opt.n_max)
        throw precondition_error("particle count exceeds configured cap");
    if (y.size() <= 3) {
        const int lo = std::min(x.front(), y.front());
        const int hi = std::max(x.back(), y.back());
        TransitionTable table(y, lo, hi, t, rates, opt);
        const double v = table.prob(x);
        return v;
    }
    return detail::direct_probability(y, x, t, rates, opt);
}

namespace detail {

// Direct nodes^N permutation sum for N >= 4 (no window batching).
inline double direct_probability(const std::vector<int>& y, const std::vector<int>& x, double t,
                                 const HoppingRates& rates, const BetheOptions& opt) {
    const int N = int(y.size());
    const double r =
        opt.radius > 0.0 ? opt.radius : ContourQuadrature::default_radius(rates);
    if (r >= small_contour_pole_radius(rates) - 1e-12)
        throw precondition_error("contour radius violates the pole condition");
    if (rates.p() == 0.0) throw precondition_error("contour formula requires p != 0");

    double prev = 0.0;
    bool have_prev = false;
    for (int n = std::max(32, opt.min_nodes); n <= opt.max_nodes; n *= 2) {
        const auto nd = make_nodes(y, t, rates, r, n);
        // per-variable per-particle power tables: base_k[j] * xi_j^{x_i}
        std::vector<std::vector<cdd>> pw(std::size_t(N) * std::size_t(N));
        for (int k = 0; k < N; ++k)
            for (int i = 0; i < N; ++i) {
                auto& col = pw[std::size_t(k) * std::size_t(N) + std::size_t(i)];
                col.resize(std::size_t(n));
                for (int j = 0; j < n; ++j)
                    col[std::size_t(j)] =
                        nd.base[std::size_t(k)][std::size_t(j)] *
                        pow_int(nd.xi[std::size_t(j)], x[std::size_t(i)]);
            }

        cdd total{};
        std::vector<int> perm(static_cast<std::size_t>(N));
        std::iota(perm.begin(), perm.end(), 1);
        std::vector<std::size_t> j(std::size_t(N), 0);
        do {
            std::vector<int> invp(static_cast<std::size_t>(N));
            for (int i = 0; i < N; ++i) invp[std::size_t(perm[std::size_t(i)] - 1)] = i;
            std::vector<std::pair<int, int>> inv;
            for (int a = 0; a < N; ++a)
                for (int b = a + 1; b < N; ++b)
                    if (perm[std::size_t(a)] > perm[std::size_t(b)])
                        inv.emplace_back(perm[std::size_t(a)] - 1, perm[std::size_t(b)] - 1);
            std::fill(j.begin(), j.end(), 0);
            while (true) {
                cdd v = pw[0 * std::size_t(N) + std::size_t(invp[0])][j[0]];
                for (int k = 1; k < N; ++k)
                    v *= pw[std::size_t(k) * std::size_t(N) + std::size_t(invp[std::size_t(k)])]
                           [j[std::size_t(k)]];
                for (const auto& [a, b] : inv)
                    v *= nd.smat[j[std::size_t(a)] * std::size_t(n) + j[std::size_t(b)]];
                total += v;
                int axis = N - 1;
                while (axis >= 0 && ++j[std::size_t(axis)] == std::size_t(n)) {
                    j[std::size_t(axis)] = 0;
                    --axis;
                }
                if (axis < 0) break;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        const double val = to_double(total.re);
        if (std::fabs(to_double(total.im)) > opt.imag_tol)
            throw convergence_error("imaginary residual above tolerance");
        if (have_prev && std::fabs(val - prev) < opt.conv_tol * std::max(1.0, std::fabs(val)))
            return val;
        prev = val;
        have_prev = true;
    }
    throw convergence_error("node doubling did not converge by the cap");
}

}  // namespace detail

}  // namespace aseplab
