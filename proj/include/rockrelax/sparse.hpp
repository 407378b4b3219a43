#pragma once

#include <vector>

namespace rockrelax {

/// Symmetric positive-definite matrix in compressed sparse row form.
struct SparseSPDMatrix {
    int n = 0;
    std::vector<int> row_ptr; // size n+1
    std::vector<int> cols;
    std::vector<double> vals;

    void matvec(const double* x, double* y) const;
    std::vector<double> matvec(const std::vector<double>& x) const;

    /// Entry (i,j), zero if not stored. Test/diagnostic helper.
    double entry(int i, int j) const;

    static SparseSPDMatrix from_dense(const std::vector<std::vector<double>>& dense);
};

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// Terminates when ||Ax - b||_2 <= tol * ||b||_2; throws ConvergenceError
/// after 10*n iterations. iters_out (optional) receives the iteration count.
std::vector<double> solve_cg(const SparseSPDMatrix& A,
                             const std::vector<double>& rhs,
                             double tol = 1e-10,
                             int* iters_out = nullptr);

/// Same solve seeded with x0 (pass an empty vector for a zero start). The
/// stopping test stays relative to ||rhs||, so the answer matches the
/// zero-start solve to within the tolerance; only the iteration count
/// changes. Used to chain solves whose right-hand sides drift slowly.
std::vector<double> solve_cg(const SparseSPDMatrix& A,
                             const std::vector<double>& rhs,
                             const std::vector<double>& x0,
                             double tol = 1e-10,
                             int* iters_out = nullptr);

} // namespace rockrelax
