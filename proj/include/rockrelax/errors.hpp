#pragma once

#include <stdexcept>

namespace rockrelax {

/// Diffusion coefficient dropped to or below zero somewhere: the elliptic
/// operator is no longer uniformly coercive and no solve is attempted.
struct CoercivityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A perturbation vector left its feasible set (probability simplex /
/// pointwise bounds / support box). Infeasibility is always an error,
/// never a sentinel objective value.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative solver exhausted its iteration cap before reaching its
/// residual tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rockrelax
