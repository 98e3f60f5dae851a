#pragma once

#include <vector>

namespace wbf {

// Thomas algorithm. sub[i] couples row i with i-1 (sub[0] unused), sup[i]
// couples row i with i+1 (sup[n-1] unused). Assumes diagonal dominance or
// SPD, which holds for every system assembled in this library.
template <class Real>
std::vector<Real> solve_tridiagonal(const std::vector<Real>& sub, std::vector<Real> diag,
                                    const std::vector<Real>& sup, std::vector<Real> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const Real m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<Real> x(n);
    if (n == 0) return x;
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    return x;
}

} // namespace wbf
