#pragma once

// Numerical verification of the algebraic identities behind the marginal
// distribution formulas: the signed permutation sum (#1), the weighted
// subset sums (#2, #3), and the Cauchy-type determinant evaluation of
// det(1/f(i,j)). Each check returns a relative residual at a given point.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include "aseplab/errors.hpp"
#include "aseplab/hopping_rates.hpp"
#include "aseplab/rng.hpp"
#include "aseplab/tau_binomial.hpp"

namespace aseplab {

using complexd = std::complex<double>;

// f(i, j) = p + q xi_i xi_j - xi_i
inline complexd f_bilinear(complexd xi_i, complexd xi_j, const HoppingRates& rates) {
    return rates.p() + rates.q() * xi_i * xi_j - xi_i;
}

namespace detail {

inline void require_distinct(const std::vector<complexd>& xi) {
    for (std::size_t i = 0; i < xi.size(); ++i)
        for (std::size_t j = i + 1; j < xi.size(); ++j)
            if (std::abs(xi[i] - xi[j]) < 1e-9)
                throw precondition_error("test point has nearly coincident coordinates");
}

inline double rel_residual(complexd lhs, complexd rhs) {
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

// visit all m-subsets S of {0..n-1}; fn(S, S_complement)
template <class F>
void for_each_subset(int n, int m, F&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        std::vector<int> comp;
        comp.reserve(std::size_t(n - m));
        for (int v = 0, k = 0; v < n; ++v) {
            if (k < m && idx[std::size_t(k)] == v)
                ++k;
            else
                comp.push_back(v);
        }
        fn(idx, comp);
        int i = m - 1;
        while (i >= 0 && idx[std::size_t(i)] == n - m + i) --i;
        if (i < 0) break;
        ++idx[std::size_t(i)];
        for (int j = i + 1; j < m; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
    }
}

}  // namespace detail

// Identity #1:
//   sum_sigma sgn(sigma) prod_{i<j} f(sigma(i),sigma(j)) /
//     prod_k (xi_{sigma(1)}...xi_{sigma(k)} - 1)
//   = q^{N(N-1)/2} prod_{i<j}(xi_j - xi_i) / prod_j (xi_j - 1)
inline double check_identity1(const std::vector<complexd>& xi, const HoppingRates& rates) {
    detail::require_distinct(xi);
    const int n = int(xi.size());
    for (const auto& z : xi)
        if (std::abs(z - 1.0) < 1e-9)
            throw precondition_error("coordinate too close to 1");

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    complexd lhs = 0.0;
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm[std::size_t(i)] > perm[std::size_t(j)]) ++inversions;
        complexd num = 1.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                num *= f_bilinear(xi[std::size_t(perm[std::size_t(i)])],
                                  xi[std::size_t(perm[std::size_t(j)])], rates);
        complexd den = 1.0, partial = 1.0;
        for (int k = 0; k < n; ++k) {
            partial *= xi[std::size_t(perm[std::size_t(k)])];
            if (std::abs(partial - 1.0) < 1e-9)
                throw precondition_error("partial product too close to 1");
            den *= partial - 1.0;
        }
        lhs += double(inversions % 2 == 0 ? 1 : -1) * num / den;
    } while (std::next_permutation(perm.begin(), perm.end()));

    complexd rhs = std::pow(complexd(rates.q()), n * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) rhs *= xi[std::size_t(j)] - xi[std::size_t(i)];
    for (int j = 0; j < n; ++j) rhs /= xi[std::size_t(j)] - 1.0;
    return detail::rel_residual(lhs, rhs);
}

// Identity #2 (N >= m+1):
//   sum_{|S|=m} prod_{i in S, j in S^c} f(i,j)/(xi_j - xi_i) (1 - prod_{S^c} xi)
//   = q^m [N-1 m] (1 - prod_j xi_j)
inline double check_identity2(const std::vector<complexd>& xi, int m, const HoppingRates& rates) {
    detail::require_distinct(xi);
    const int n = int(xi.size());
    if (n < m + 1) throw precondition_error("identity #2 requires N >= m + 1");
    if (m < 0) throw precondition_error("m must be nonnegative");

    complexd lhs = 0.0;
    detail::for_each_subset(n, m, [&](const std::vector<int>& s, const std::vector<int>& sc) {
        complexd term = 1.0;
        for (int i : s)
            for (int j : sc)
                term *= f_bilinear(xi[std::size_t(i)], xi[std::size_t(j)], rates) /
                        (xi[std::size_t(j)] - xi[std::size_t(i)]);
        complexd prod_sc = 1.0;
        for (int j : sc) prod_sc *= xi[std::size_t(j)];
        lhs += term * (1.0 - prod_sc);
    });

    complexd prod_all = 1.0;
    for (const auto& z : xi) prod_all *= z;
    const TauBinomial tb(rates);
    const complexd rhs =
        std::pow(rates.q(), m) * tb.binom_modified(n - 1, m) * (1.0 - prod_all);
    return detail::rel_residual(lhs, rhs);
}

// Identity #3:
//   sum_{|S|=m} prod_{i in S, j in S^c} f(i,j)/(xi_j - xi_i) = [N m]
inline double check_identity3(const std::vector<complexd>& xi, int m, const HoppingRates& rates) {
    detail::require_distinct(xi);
    const int n = int(xi.size());
    if (m < 0 || m > n) throw precondition_error("m out of range");

    complexd lhs = 0.0;
    detail::for_each_subset(n, m, [&](const std::vector<int>& s, const std::vector<int>& sc) {
        complexd term = 1.0;
        for (int i : s)
            for (int j : sc)
                term *= f_bilinear(xi[std::size_t(i)], xi[std::size_t(j)], rates) /
                        (xi[std::size_t(j)] - xi[std::size_t(i)]);
        lhs += term;
    });
    const TauBinomial tb(rates);
    return detail::rel_residual(lhs, complexd(tb.binom_modified(n, m)));
}

// Determinant evaluation:
//   det(1/f(i,j))_{k x k} = (-1)^k (pq)^{k(k-1)/2}
//       prod_{i != j} (xi_j - xi_i)/f(i,j) prod_i 1/((1-xi_i)(q xi_i - p))
inline double check_det_identity(const std::vector<complexd>& xi, const HoppingRates& rates) {
    detail::require_distinct(xi);
    const int k = int(xi.size());
    const double tau = rates.tau();
    for (const auto& z : xi) {
        if (std::abs(z - 1.0) < 1e-9 || std::abs(z - tau) < 1e-9)
            throw precondition_error("coordinate too close to a pole of the product form");
    }

    Eigen::MatrixXcd a(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const complexd f = f_bilinear(xi[std::size_t(i)], xi[std::size_t(j)], rates);
            if (std::abs(f) < 1e-12)
                throw precondition_error("f(i,j) vanishes at the test point");
            a(i, j) = 1.0 / f;
        }
    const complexd lhs = a.partialPivLu().determinant();

    complexd rhs = double(k % 2 == 0 ? 1 : -1) *
                   std::pow(rates.p() * rates.q(), k * (k - 1) / 2);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j)
                rhs *= (xi[std::size_t(j)] - xi[std::size_t(i)]) /
                       f_bilinear(xi[std::size_t(i)], xi[std::size_t(j)], rates);
    for (int i = 0; i < k; ++i)
        rhs /= (1.0 - xi[std::size_t(i)]) * (rates.q() * xi[std::size_t(i)] - rates.p());
    return detail::rel_residual(lhs, rhs);
}

// Random test points from the annulus 0.3 <= |xi| <= 1.7, staying 1e-2 away
// from 1, tau, and from each other.
inline std::vector<complexd> random_test_point(int n, const HoppingRates& rates,
                                               RngStream& rng) {
    const double tau = rates.tau();
    std::vector<complexd> xi;
    xi.reserve(std::size_t(n));
    while (int(xi.size()) < n) {
        const double r = 0.3 + 1.4 * rng.u01();
        const double th = 2.0 * 3.141592653589793238462643383279503 * rng.u01();
        const complexd z = std::polar(r, th);
        if (std::abs(z - 1.0) < 1e-2 || std::abs(z - tau) < 1e-2) continue;
        bool clash = false;
        for (const auto& w : xi)
            if (std::abs(z - w) < 1e-2) clash = true;
        if (!clash) xi.push_back(z);
    }
    return xi;
}

}  // namespace aseplab
