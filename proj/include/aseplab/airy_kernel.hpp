#pragma once

// F2 as the Fredholm determinant of the Airy kernel on (s, inf), by Nystrom
// discretization with Gauss-Legendre nodes under the change of variables
// x = s + L tan(pi (1+u)/4), u in (-1, 1), which compresses the semi-axis
// while keeping the integrand analytic. Serves as the cross-route oracle
// for the Painleve II evaluation of F2.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "aseplab/airy.hpp"
#include "aseplab/errors.hpp"
#include "aseplab/gauss_legendre.hpp"

namespace aseplab {

// (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y), continued onto the diagonal.
inline double airy_kernel(double x, double y) {
    if (std::fabs(x - y) < 1e-7) {
        const double z = 0.5 * (x + y);
        const AiryPair a = airy_dd(dd(z));
        return a.aip.hi * a.aip.hi - z * a.ai.hi * a.ai.hi;
    }
    const AiryPair ax = airy_dd(dd(x));
    const AiryPair ay = airy_dd(dd(y));
    return (ax.ai.hi * ay.aip.hi - ax.aip.hi * ay.ai.hi) / (x - y);
}

inline double airy_fredholm_f2(double s, int n_quad = 96) {
    if (n_quad < 16) throw precondition_error("need at least 16 quadrature nodes");
    static const double pi = 3.141592653589793238462643383279503;
    const double L = 10.0;

    const GaussLegendre gl(n_quad);
    const auto nq = static_cast<std::size_t>(n_quad);
    std::vector<double> x(nq), sw(nq), ai(nq), aip(nq);
    for (int i = 0; i < n_quad; ++i) {
        const double arg = 0.25 * pi * (1.0 + gl.x[std::size_t(i)]);
        const double c = std::cos(arg);
        x[std::size_t(i)] = s + L * std::tan(arg);
        const double jac = L * 0.25 * pi / (c * c);
        sw[std::size_t(i)] = std::sqrt(gl.w[std::size_t(i)] * jac);
        const AiryPair ap = airy_dd(dd(x[std::size_t(i)]));
        ai[std::size_t(i)] = ap.ai.hi;
        aip[std::size_t(i)] = ap.aip.hi;
    }

    Eigen::MatrixXd m(n_quad, n_quad);
    for (int i = 0; i < n_quad; ++i) {
        for (int j = 0; j < n_quad; ++j) {
            double k;
            if (i == j) {
                k = aip[std::size_t(i)] * aip[std::size_t(i)] -
                    x[std::size_t(i)] * ai[std::size_t(i)] * ai[std::size_t(i)];
            } else {
                k = (ai[std::size_t(i)] * aip[std::size_t(j)] -
                     aip[std::size_t(i)] * ai[std::size_t(j)]) /
                    (x[std::size_t(i)] - x[std::size_t(j)]);
            }
            m(i, j) = sw[std::size_t(i)] * sw[std::size_t(j)] * k;
        }
    }
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n_quad, n_quad) - m;
    return a.partialPivLu().determinant();
}

}  // namespace aseplab
