#pragma once

#include "hp/types.hpp"

#include <cmath>

namespace hp {

// Swaps the adjacent diagonal entries k, k+1 of the upper-triangular T with a
// unitary rotation, accumulating it into U.
inline void swap_schur_pair(CMatrix& U, CMatrix& T, Eigen::Index k) {
    const Complex a = T(k, k);
    const Complex b = T(k + 1, k + 1);
    const Complex c = T(k, k + 1);
    Complex x1 = c;
    Complex x2 = b - a;
    const double nrm = std::hypot(std::abs(x1), std::abs(x2));
    if (nrm == 0.0) return;
    x1 /= nrm;
    x2 /= nrm;
    // G = [x, x_perp]; G^* T G puts b first.
    Eigen::Matrix2cd G;
    G << x1, -std::conj(x2), x2, std::conj(x1);
    T.middleRows(k, 2) = G.adjoint() * T.middleRows(k, 2);
    T.middleCols(k, 2) = T.middleCols(k, 2) * G;
    U.middleCols(k, 2) = U.middleCols(k, 2) * G;
    T(k + 1, k) = Complex(0.0, 0.0);
    T(k, k) = b;
    T(k + 1, k + 1) = a;
}

template <typename Pred>
void reorder_schur(CMatrix& U, CMatrix& T, Pred first) {
    const Eigen::Index n = T.rows();
    Eigen::Index placed = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!first(T(i, i))) continue;
        for (Eigen::Index k = i; k > placed; --k) swap_schur_pair(U, T, k - 1);
        ++placed;
    }
}

} // namespace hp
