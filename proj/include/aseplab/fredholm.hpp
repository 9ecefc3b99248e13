#pragma once

// Finite-time marginal distributions P_rho(x_m(t) <= x) via Fredholm
// determinants of the circle kernel K_rho, and the truncated series form
// used as a cross-check.
//
// det(I - lambda M) is needed at many lambda nodes on a circle; M is
// diagonalized once and the determinant evaluated as prod(1 - lambda mu_i).
// det_i_minus_lambda_k provides the direct LU evaluation of the same
// quantity, which tests compare against the spectral route.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "aseplab/errors.hpp"
#include "aseplab/hopping_rates.hpp"
#include "aseplab/tau_binomial.hpp"

namespace aseplab {

struct KernelParams {
    HoppingRates rates;
    double rho;   // Bernoulli density in (0, 1]
    int x;        // position argument
    double t;     // time
};

// K_rho(xi, xi') = q xi^x e^{t eps(xi)} / (p + q xi xi' - xi)
//                  * rho (xi - tau) / (xi - 1 + rho (1 - tau))
// For rho = 1 the density factor is identically one and is skipped so the
// step initial condition incurs no rounding from it.
inline std::complex<double> k_rho(std::complex<double> xi, std::complex<double> xip,
                                  const KernelParams& kp) {
    const double p = kp.rates.p(), q = kp.rates.q();
    const std::complex<double> den = p + q * xi * xip - xi;
    const double scale = p + std::abs(q * xi * xip) + std::abs(xi);
    if (std::abs(den) < 1e-12 * scale)
        throw convergence_error("kernel pole: xi-contour too close to a singularity");
    const std::complex<double> eps = p / xi + q * xi - 1.0;
    // xi^x with the magnitude tracked in log space (integer power, no branch
    // cut issues)
    const std::complex<double> xi_pow =
        std::polar(std::exp(double(kp.x) * std::log(std::abs(xi))),
                   double(kp.x) * std::arg(xi));
    std::complex<double> v = q * xi_pow * std::exp(kp.t * eps) / den;
    if (kp.rho != 1.0) {
        const double tau = kp.rates.tau();
        const std::complex<double> bden = xi - 1.0 + kp.rho * (1.0 - tau);
        if (std::abs(bden) < 1e-12)
            throw convergence_error("kernel pole: Bernoulli factor singular on the contour");
        v *= kp.rho * (xi - tau) / bden;
    }
    return v;
}

// Nystrom discretization of K_rho on the circle |xi| = R with trapezoid
// weights w_k = xi_k / n (the 1/(2 pi i) convention).
class CircleKernelDiscretization {
  public:
    CircleKernelDiscretization(double big_radius, int n, const KernelParams& kp)
        : R_(big_radius), n_(n), kp_(kp) {
        if (n < 16) throw precondition_error("need at least 16 contour nodes");
        build();
    }

    double radius() const { return R_; }
    int nodes() const { return n_; }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    const std::vector<std::complex<double>>& xi() const { return xi_; }

    // min |p + q xi xi' - xi| over the node grid
    double pole_margin() const {
        const double p = kp_.rates.p(), q = kp_.rates.q();
        double m = std::numeric_limits<double>::max();
        for (const auto& a : xi_)
            for (const auto& b : xi_) m = std::min(m, std::abs(p + q * a * b - a));
        return m;
    }

    const Eigen::VectorXcd& eigenvalues() const {
        if (eig_.size() == 0) {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m_, false);
            eig_ = solver.eigenvalues();
        }
        return eig_;
    }

    // All finite poles must lie inside the contour: the Bernoulli-factor
    // pole sits in (0, 1), and the images of the f-pole stay inside iff
    // q R^2 - R - p > 0.
    static double min_radius(const HoppingRates& rates) {
        const double p = rates.p(), q = rates.q();
        const double r_f = (1.0 + std::sqrt(1.0 + 4.0 * p * q)) / (2.0 * q);
        return 1.02 * std::max(1.0, r_f);
    }

    // Radius minimizing the worst entry magnitude |xi^x e^{t eps}| over the
    // admissible range; large |x| t would otherwise push entries far beyond
    // the determinant's scale and waste the mantissa on cancellation.
    static double choose_radius(const KernelParams& kp) {
        const double p = kp.rates.p(), q = kp.rates.q();
        const double lo = min_radius(kp.rates);
        const double hi = std::max(3.0 * std::max(1.0, 1.0 / std::sqrt(kp.rates.tau())), lo * 1.5);
        double best_r = lo, best_g = std::numeric_limits<double>::max();
        for (int i = 0; i <= 80; ++i) {
            const double r = lo * std::pow(hi / lo, double(i) / 80.0);
            const double g = double(kp.x) * std::log(r) + kp.t * (p / r + q * r - 1.0);
            if (g < best_g) {
                best_g = g;
                best_r = r;
            }
        }
        return best_r;
    }

  private:
    double R_;
    int n_;
    KernelParams kp_;
    std::vector<std::complex<double>> xi_;
    Eigen::MatrixXcd m_;
    mutable Eigen::VectorXcd eig_;

    void build() {
        const double pi = 3.141592653589793238462643383279503;
        xi_.resize(std::size_t(n_));
        for (int j = 0; j < n_; ++j)
            xi_[std::size_t(j)] = std::polar(R_, 2.0 * pi * double(j) / double(n_));
        if (pole_margin() < 1e-3)
            throw convergence_error("xi-contour pole margin below 1e-3");
        m_.resize(n_, n_);
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k)
                m_(j, k) = k_rho(xi_[std::size_t(j)], xi_[std::size_t(k)], kp_) *
                           (xi_[std::size_t(k)] / double(n_));
    }
};

// det(I - lambda M) by LU on the Nystrom matrix.
inline std::complex<double> det_i_minus_lambda_k(std::complex<double> lambda,
                                                 const CircleKernelDiscretization& disc) {
    const int n = disc.nodes();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n) - lambda * disc.matrix();
    return a.partialPivLu().determinant();
}

struct MarginalResult {
    double value;         // clamped to [0, 1]
    double raw;           // unclamped real part
    double imag_residue;  // |imaginary part| of the lambda integral
    int n_xi;
    int n_lambda;
    double xi_radius;
    double lambda_radius;
};

struct MarginalOptions {
    double radius = 0.0;       // xi-circle; 0 = choose automatically
    int min_xi_nodes = 64;
    int max_xi_nodes = 512;
    int min_lambda_nodes = 64;
    int max_lambda_nodes = 2048;
    double tol = 1e-10;
    double imag_tol = 1e-8;
};

namespace detail {

inline std::complex<double> spectral_det(const Eigen::VectorXcd& eig,
                                         std::complex<double> lam) {
    std::complex<double> det = 1.0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) det *= 1.0 - lam * eig[i];
    return det;
}

// integral over the lambda circle of det(I - lambda K) / prod_j (1 - lambda tau^j),
// d lambda / (2 pi i lambda). The integrand is rational in lambda with poles
// only at 0 and tau^{-j}, so the contour integral collapses to the exact
// residue sum
//   1 - sum_{j<m} det(I - tau^{-j} K) / prod_{l<m, l!=j} (1 - tau^{l-j}).
// This is what the evaluator uses: unlike the trapezoid on the lambda
// circle it costs m determinant evaluations and is immune to the
// cancellation that appears when |det| is large on the circle.
inline std::complex<double> lambda_residue_sum(const Eigen::VectorXcd& eig, int m, double tau) {
    std::complex<double> acc = 1.0;  // residue at lambda = 0
    for (int j = 0; j < m; ++j) {
        const double lam = std::pow(tau, -j);
        double denom = 1.0;
        for (int l = 0; l < m; ++l)
            if (l != j) denom *= 1.0 - std::pow(tau, l - j);
        acc -= spectral_det(eig, lam) / denom;
    }
    return acc;
}

// Trapezoid evaluation of the same lambda integral; route check only.
inline std::complex<double> lambda_integral(const Eigen::VectorXcd& eig, int m, double tau,
                                            double lam_radius, int n_lambda) {
    const double pi = 3.141592653589793238462643383279503;
    std::complex<double> acc = 0.0;
    for (int k = 0; k < n_lambda; ++k) {
        const std::complex<double> lam =
            std::polar(lam_radius, 2.0 * pi * double(k) / double(n_lambda));
        std::complex<double> denom = 1.0;
        double tj = 1.0;
        for (int j = 0; j < m; ++j) {
            denom *= 1.0 - lam * tj;
            tj *= tau;
        }
        acc += spectral_det(eig, lam) / denom;
    }
    return acc / double(n_lambda);
}

}  // namespace detail

// P_rho(x_m(t) <= x) by the contour-integral formula over the Fredholm
// determinant of K_rho.
inline MarginalResult marginal_cdf(int m, int x, double t, const HoppingRates& rates,
                                   double rho, MarginalOptions opt = MarginalOptions()) {
    rates.require_drift_left();
    if (m < 1) throw precondition_error("particle index must be >= 1");
    if (!(rho > 0.0 && rho <= 1.0)) throw precondition_error("rho must lie in (0, 1]");
    if (t < 0.0) throw precondition_error("time must be nonnegative");
    const double tau = rates.tau();

    const KernelParams kp{rates, rho, x, t};
    const double R = opt.radius > 0.0 ? opt.radius : CircleKernelDiscretization::choose_radius(kp);
    const double lam_radius = 1.5 * std::pow(tau, -(m - 1));

    double prev_xi = 0.0, prev_imag = 0.0;
    bool have_xi = false;
    for (int n_xi = opt.min_xi_nodes; n_xi <= opt.max_xi_nodes; n_xi *= 2) {
        const CircleKernelDiscretization disc(R, n_xi, kp);
        const Eigen::VectorXcd& eig = disc.eigenvalues();

        const std::complex<double> integral = detail::lambda_residue_sum(eig, m, tau);

        const double val = integral.real();
        // the integral is real analytically; the imaginary residue gauges
        // the floating-point noise floor of the spectral evaluation, below
        // which further node doubling cannot help
        const double noise_floor =
            20.0 * (std::fabs(integral.imag()) + prev_imag);
        const double stop_at =
            std::max(opt.tol * std::max(1.0, std::fabs(val)), noise_floor);
        if (have_xi && std::fabs(val - prev_xi) < stop_at) {
            if (std::fabs(integral.imag()) > opt.imag_tol)
                throw convergence_error("imaginary residue above tolerance in marginal");
            MarginalResult res;
            res.raw = val;
            res.value = std::clamp(val, 0.0, 1.0);
            res.imag_residue = std::fabs(integral.imag());
            res.n_xi = n_xi;
            res.n_lambda = m;  // residue evaluations on the lambda side
            res.xi_radius = R;
            res.lambda_radius = lam_radius;
            return res;
        }
        prev_xi = val;
        prev_imag = std::fabs(integral.imag());
        have_xi = true;
    }
    throw convergence_error("xi-contour nodes exhausted before convergence");
}

// Same marginal through the lambda-circle trapezoid; used to confirm the
// residue evaluation on parameter ranges where both are well conditioned.
inline double marginal_cdf_lambda_trapezoid(int m, int x, double t, const HoppingRates& rates,
                                            double rho, int n_xi = 128, int n_lambda = 512) {
    rates.require_drift_left();
    const double tau = rates.tau();
    const KernelParams kp{rates, rho, x, t};
    const double R = CircleKernelDiscretization::choose_radius(kp);
    const CircleKernelDiscretization disc(R, n_xi, kp);
    const double lam_radius = 1.5 * std::pow(tau, -(m - 1));
    return detail::lambda_integral(disc.eigenvalues(), m, tau, lam_radius, n_lambda).real();
}

// Series coefficients c_{m,k} = (-1)^m q^{k(k-1)} tau^{m(m-1)/2 - k m} [k-1 m-1]_tau.
struct SeriesCoefficients {
    int m;
    int k_max;
    double tau;
    std::vector<double> c;  // c[k-1] = c_{m,k}, k = 1..k_max

    SeriesCoefficients(int m_, int k_max_, const HoppingRates& rates)
        : m(m_), k_max(k_max_), tau(rates.tau()) {
        if (rates.p() <= 0.0)
            throw precondition_error("series coefficients in the stated form need p > 0");
        const TauBinomial tb(rates);
        const double q = rates.q();
        c.reserve(std::size_t(k_max));
        for (int k = 1; k <= k_max; ++k) {
            const double v = (m % 2 == 0 ? 1.0 : -1.0) * std::pow(q, k * (k - 1)) *
                             std::pow(tau, 0.5 * m * (m - 1) - double(k) * m) *
                             tb.binom_tau(k - 1, m - 1);
            c.push_back(v);
        }
    }
};

struct SeriesResult {
    double value;
    double last_term_magnitude;
    std::vector<double> terms;  // contribution of each k
    int n_xi;
};

// Truncated k-sum form of the marginal: term k carries a k-fold contour
// integral; the combined prefactor is evaluated with the exponent
// (k-m)(k-m+1)/2 so tau -> 0 stays finite.
inline SeriesResult marginal_cdf_series(int m, int x, double t, const HoppingRates& rates,
                                        double rho, int k_max,
                                        MarginalOptions opt = MarginalOptions()) {
    rates.require_drift_left();
    if (k_max < 1 || k_max > 4)
        throw precondition_error("series truncation supported for 1 <= k_max <= 4");
    if (m < 1) throw precondition_error("particle index must be >= 1");
    if (!(rho > 0.0 && rho <= 1.0)) throw precondition_error("rho must lie in (0, 1]");
    const double p = rates.p(), q = rates.q(), tau = rates.tau();
    const TauBinomial tb(rates);

    const KernelParams kp{rates, rho, x, t};
    const double R = opt.radius > 0.0 ? opt.radius : CircleKernelDiscretization::choose_radius(kp);

    SeriesResult out;
    double prev_total = 0.0;
    bool have_prev = false;
    for (int n = opt.min_xi_nodes; n <= opt.max_xi_nodes; n *= 2) {
        const double pi = 3.141592653589793238462643383279503;
        std::vector<std::complex<double>> xi(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            xi[std::size_t(j)] = std::polar(R, 2.0 * pi * double(j) / double(n));

        // diagonal factor: rho/(xi-1+rho(1-tau)) * xi^x e^{t eps} / (1 - xi) * w
        std::vector<std::complex<double>> diag(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const auto z = xi[std::size_t(j)];
            const std::complex<double> eps = p / z + q * z - 1.0;
            const std::complex<double> zx =
                std::polar(std::exp(double(x) * std::log(R)), double(x) * std::arg(z));
            diag[std::size_t(j)] = rho / (z - 1.0 + rho * (1.0 - tau)) * zx *
                                   std::exp(t * eps) / (1.0 - z) * (z / double(n));
        }
        // H[a][b] = (xi_b - xi_a)(xi_a - xi_b) / (f(a,b) f(b,a)); zero diagonal
        std::vector<std::complex<double>> H(std::size_t(n) * std::size_t(n));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b) {
                    H[std::size_t(a) * std::size_t(n) + std::size_t(b)] = 0.0;
                    continue;
                }
                const auto za = xi[std::size_t(a)], zb = xi[std::size_t(b)];
                const std::complex<double> fab = p + q * za * zb - za;
                const std::complex<double> fba = p + q * zb * za - zb;
                H[std::size_t(a) * std::size_t(n) + std::size_t(b)] =
                    (zb - za) * (za - zb) / (fab * fba);
            }

        std::vector<std::complex<double>> integrals(std::size_t(k_max), 0.0);
        // k = 1
        {
            std::complex<double> acc = 0.0;
            for (int a = 0; a < n; ++a) acc += diag[std::size_t(a)];
            integrals[0] = acc;
        }
        if (k_max >= 2) {
            std::complex<double> acc = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    acc += diag[std::size_t(a)] * diag[std::size_t(b)] *
                           H[std::size_t(a) * std::size_t(n) + std::size_t(b)];
            integrals[1] = acc;
        }
        if (k_max >= 3) {
            std::complex<double> acc = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const auto hab = H[std::size_t(a) * std::size_t(n) + std::size_t(b)];
                    if (hab == std::complex<double>(0.0)) continue;
                    const auto dab = diag[std::size_t(a)] * diag[std::size_t(b)] * hab;
                    for (int cc = 0; cc < n; ++cc)
                        acc += dab * diag[std::size_t(cc)] *
                               H[std::size_t(a) * std::size_t(n) + std::size_t(cc)] *
                               H[std::size_t(b) * std::size_t(n) + std::size_t(cc)];
                }
            integrals[2] = acc;
        }
        if (k_max >= 4) {
            std::complex<double> acc = 0.0;
            auto h_at = [&](int i, int j) {
                return H[std::size_t(i) * std::size_t(n) + std::size_t(j)];
            };
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const auto hab = h_at(a, b);
                    if (hab == std::complex<double>(0.0)) continue;
                    const auto dab = diag[std::size_t(a)] * diag[std::size_t(b)] * hab;
                    for (int c0 = 0; c0 < n; ++c0) {
                        const auto d3 =
                            dab * diag[std::size_t(c0)] * h_at(a, c0) * h_at(b, c0);
                        if (d3 == std::complex<double>(0.0)) continue;
                        for (int d0 = 0; d0 < n; ++d0)
                            acc += d3 * diag[std::size_t(d0)] * h_at(a, d0) * h_at(b, d0) *
                                   h_at(c0, d0);
                    }
                }
            integrals[3] = acc;
        }

        double total = 0.0;
        out.terms.assign(std::size_t(k_max), 0.0);
        for (int k = 1; k <= k_max; ++k) {
            // combined prefactor, written so tau -> 0 stays finite; the
            // q-power is the one consistent with the Fredholm expansion of
            // det(I - lambda K) (route equivalence pins it)
            const double pref = (m % 2 == 0 ? 1.0 : -1.0) *
                                std::pow(q, double(k) * (k - 1)) *
                                std::pow(tau, 0.5 * double(k - m) * double(k - m + 1)) *
                                tb.binom_tau(k - 1, m - 1) / std::tgamma(double(k) + 1.0);
            const double term = pref * integrals[std::size_t(k - 1)].real();
            out.terms[std::size_t(k - 1)] = term;
            total += term;
        }
        if (have_prev && std::fabs(total - prev_total) < opt.tol * std::max(1.0, std::fabs(total))) {
            out.value = total;
            out.last_term_magnitude = std::fabs(out.terms.back());
            out.n_xi = n;
            // a non-decreasing tail among the nonzero terms means the
            // truncation heuristic is meaningless
            for (std::size_t k = std::size_t(std::max(m, 1)); k + 1 < out.terms.size(); ++k) {
                if (out.terms[k] != 0.0 &&
                    std::fabs(out.terms[k + 1]) >= std::fabs(out.terms[k]))
                    throw convergence_error("series terms are not decreasing at the truncation");
            }
            return out;
        }
        prev_total = total;
        have_prev = true;
    }
    throw convergence_error("series quadrature did not converge by the node cap");
}

}  // namespace aseplab
