#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace rram {

/// Row-major dense square matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    [[nodiscard]] std::size_t size() const { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

    void resize(std::size_t n) {
        n_ = n;
        a_.assign(n * n, 0.0);
    }
    void fill(double x) { std::fill(a_.begin(), a_.end(), x); }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
/// On return `b` holds x; `a` is overwritten. Throws TopologyError when a
/// pivot is negligible relative to its row scale (singular system).
void solve_in_place(DenseMatrix& a, std::vector<double>& b);

}  // namespace rram
