#pragma once

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.

#include <cmath>
#include <vector>

#include "aseplab/errors.hpp"

namespace aseplab {

struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;

    explicit GaussLegendre(int n) : x(std::size_t(n)), w(std::size_t(n)) {
        if (n < 2) throw precondition_error("need at least two quadrature nodes");
        const double pi = 3.141592653589793238462643383279503;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double xi = std::cos(pi * (double(i) + 0.75) / (double(n) + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = xi;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / double(k);
                    p0 = p1;
                    p1 = p2;
                }
                pp = double(n) * (xi * p1 - p0) / (xi * xi - 1.0);
                const double dx = p1 / pp;
                xi -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            x[std::size_t(i)] = -xi;
            x[std::size_t(n - 1 - i)] = xi;
            const double wi = 2.0 / ((1.0 - xi * xi) * pp * pp);
            w[std::size_t(i)] = wi;
            w[std::size_t(n - 1 - i)] = wi;
        }
    }
};

}  // namespace aseplab
