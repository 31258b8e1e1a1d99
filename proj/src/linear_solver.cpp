#include "rram/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rram/errors.hpp"

namespace rram {

void solve_in_place(DenseMatrix& a, std::vector<double>& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw ContractViolation("right-hand side size does not match matrix");

    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(a(r, c)));
    }
    const double tiny = scale * 1e-13;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(a(r, k)) > best) {
                best = std::abs(a(r, k));
                piv = r;
            }
        }
        if (!(best > tiny)) throw TopologyError("singular network matrix (floating node or source loop)");
        if (piv != k) {
            for (std::size_t c = k; c < n; ++c) std::swap(a(k, c), a(piv, c));
            std::swap(b[k], b[piv]);
        }
        const double inv = 1.0 / a(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a(r, k) * inv;
            if (f == 0.0) continue;
            for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= f * a(k, c);
            a(r, k) = 0.0;
            b[r] -= f * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= a(k, c) * b[c];
        b[k] = s / a(k, k);
    }
}

}  // namespace rram
