#include "rockrelax/sparse.hpp"

#include "rockrelax/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace rockrelax {

void SparseSPDMatrix::matvec(const double* x, double* y) const {
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            acc += vals[k] * x[cols[k]];
        y[i] = acc;
    }
}

std::vector<double> SparseSPDMatrix::matvec(const std::vector<double>& x) const {
    std::vector<double> y(n);
    matvec(x.data(), y.data());
    return y;
}

double SparseSPDMatrix::entry(int i, int j) const {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (cols[k] == j)
            return vals[k];
    return 0.0;
}

SparseSPDMatrix SparseSPDMatrix::from_dense(const std::vector<std::vector<double>>& dense) {
    SparseSPDMatrix A;
    A.n = static_cast<int>(dense.size());
    A.row_ptr.push_back(0);
    for (int i = 0; i < A.n; ++i) {
        for (int j = 0; j < A.n; ++j) {
            if (dense[i][j] != 0.0) {
                A.cols.push_back(j);
                A.vals.push_back(dense[i][j]);
            }
        }
        A.row_ptr.push_back(static_cast<int>(A.cols.size()));
    }
    return A;
}

std::vector<double> solve_cg(const SparseSPDMatrix& A,
                             const std::vector<double>& b,
                             double tol,
                             int* iters_out) {
    return solve_cg(A, b, std::vector<double>(), tol, iters_out);
}

std::vector<double> solve_cg(const SparseSPDMatrix& A,
                             const std::vector<double>& b,
                             const std::vector<double>& x0,
                             double tol,
                             int* iters_out) {
    if (static_cast<int>(b.size()) != A.n)
        throw std::invalid_argument("solve_cg: rhs size does not match matrix");
    if (!x0.empty() && static_cast<int>(x0.size()) != A.n)
        throw std::invalid_argument("solve_cg: initial guess size does not match matrix");
    if (!(tol >= 0.0))
        throw std::invalid_argument("solve_cg: tolerance must be nonnegative");

    const int n = A.n;
    std::vector<double> x(n, 0.0);
    double bnorm2 = 0.0;
    for (double v : b)
        bnorm2 += v * v;
    if (bnorm2 == 0.0) {
        if (iters_out) *iters_out = 0;
        return x;
    }

    // Jacobi preconditioner.
    std::vector<double> inv_diag(n, 1.0);
    for (int i = 0; i < n; ++i) {
        double d = A.entry(i, i);
        if (d > 0.0)
            inv_diag[i] = 1.0 / d;
    }

    std::vector<double> r(b), z(n), p(n), q(n);
    if (!x0.empty()) {
        x = x0;
        A.matvec(x.data(), q.data());
        for (int i = 0; i < n; ++i)
            r[i] -= q[i];
        double rnorm2 = 0.0;
        for (double v : r)
            rnorm2 += v * v;
        if (rnorm2 <= tol * tol * bnorm2) {
            if (iters_out) *iters_out = 0;
            return x;
        }
    }
    for (int i = 0; i < n; ++i)
        z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i)
        rz += r[i] * z[i];

    const double stop2 = tol * tol * bnorm2;
    const long max_iters = 10L * n;
    for (long it = 1; it <= max_iters; ++it) {
        A.matvec(p.data(), q.data());
        double pq = 0.0;
        for (int i = 0; i < n; ++i)
            pq += p[i] * q[i];
        double alpha = rz / pq;
        double rnorm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            rnorm2 += r[i] * r[i];
        }
        if (rnorm2 <= stop2) {
            if (iters_out) *iters_out = static_cast<int>(it);
            return x;
        }
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_new += r[i] * z[i];
        }
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    throw ConvergenceError("solve_cg: iteration cap (10n) exceeded");
}

} // namespace rockrelax
