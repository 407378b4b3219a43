#pragma once

#include "rockrelax/disk_mesh.hpp"
#include "rockrelax/elliptic_2d.hpp"
#include "rockrelax/grid.hpp"
#include "rockrelax/optimizers.hpp"
#include "rockrelax/random_field.hpp"
#include "rockrelax/sparse.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace rockrelax {

/// Weights and target shared by the control objectives. alpha scales the
/// control regularizer, theta the measure-perturbation penalty; q_norm picks
/// the penalty norm (1 = weighted l1, 2 = squared) and is checked against
/// what each objective actually implements. u_star holds the tracking target
/// at grid nodes / mesh vertices.
struct RockafellianConfig {
    double alpha = 1e-4;
    double theta = 1.0;
    int q_norm = 2;
    std::vector<double> u_star;
};

/// Finitely supported coefficient law on the unit interval: one midpoint
/// coefficient table per atom (tabulated once at construction, reused by
/// every solve) plus the atom probabilities. Probabilities must be
/// nonnegative but are not forced to sum to one; zero-mass atoms skip their
/// solves entirely.
struct DiscreteDistribution1D {
    const Grid1D* grid = nullptr;
    std::vector<double> probs;
    std::vector<std::vector<double>> coef_mid; // [atom][cell]

    int n_atoms() const { return static_cast<int>(probs.size()); }
};

DiscreteDistribution1D make_constant_coef_distribution(const Grid1D& grid,
                                                       const std::vector<double>& atoms,
                                                       const std::vector<double>& probs);

/// Atoms {0.2, 2.0} with probabilities (eps, 1-eps): a well-conducting
/// medium that degrades with probability eps.
DiscreteDistribution1D make_two_atom_distribution(const Grid1D& grid, double eps);

/// One atom per sample row, tabulated through the log-normal field.
DiscreteDistribution1D make_kkl_distribution(const Grid1D& grid, const KKLCoefficient& coef,
                                             const SampleSet& samples);

/// sin(pi x) at the grid nodes.
std::vector<double> target_sine(const Grid1D& grid);

/// Trapezoid-weighted inner product for 1D control fields.
InnerProduct control_inner_product(const Grid1D& grid);

/// phi(z) = 1/2 sum_i p_i ||s(xi_i, z) - u*||^2 + alpha/2 ||z||^2 with both
/// norms the trapezoid L2 norm and s the Dirichlet solve per atom.
double objective_saa(const std::vector<double>& z, const DiscreteDistribution1D& dist,
                     const RockafellianConfig& cfg);

/// Riesz representative of d phi/dz in the trapezoid inner product:
/// alpha z + sum_i p_i p_i^adj  (p_i^adj the adjoint state of atom i).
std::vector<double> grad_z_saa(const std::vector<double>& z, const DiscreteDistribution1D& dist,
                               const RockafellianConfig& cfg);

/// Linear coefficient of t_i in the relaxed objective:
/// c_i = 1/2 ||s(xi_i, z) - u*||^2. Feeds TSubproblem::costs.
std::vector<double> t_subproblem_costs(const std::vector<double>& z,
                                       const DiscreteDistribution1D& dist,
                                       const RockafellianConfig& cfg);

/// Feasible interval [lo, hi] of the free transfer coordinate t2 for a
/// two-atom law: both perturbed probabilities must stay inside [0, 1]
/// (the first atom receives -t2).
std::pair<double, double> two_atom_t_bounds(const DiscreteDistribution1D& dist);

/// Phi(z, t2) = 1/2 [(p1 - t2) c1 + (p2 + t2) c2] + alpha/2 ||z||^2
///            + theta t2^2
/// for a two-atom law; the penalty is (theta/2)(t1^2 + t2^2) with t1 = -t2
/// eliminated. Throws InfeasibleError when a perturbed probability leaves
/// [0, 1]; requires q_norm == 2.
double rock_objective_ex1(const std::vector<double>& z, double t2,
                          const DiscreteDistribution1D& dist, const RockafellianConfig& cfg);

/// (d/dz, d/dt2) of rock_objective_ex1. The z part is a trapezoid-Riesz
/// field; the t2 part is 1/2 (c2 - c1) + 2 theta t2.
std::pair<std::vector<double>, double> rock_grad_ex1(const std::vector<double>& z, double t2,
                                                     const DiscreteDistribution1D& dist,
                                                     const RockafellianConfig& cfg);

/// Phi(z, t) = 1/2 sum_i (p_i + t_i) c_i + alpha/2 ||z||^2 + theta ||t||_1.
/// Feasibility (InfeasibleError otherwise): p + t on the probability
/// simplex and |t_i| <= p_i componentwise. Requires q_norm == 1.
double rock_objective_ex2(const std::vector<double>& z, const std::vector<double>& t,
                          const DiscreteDistribution1D& dist, const RockafellianConfig& cfg);

/// d/dz of rock_objective_ex2 at fixed t (trapezoid-Riesz field).
std::vector<double> rock_grad_z_ex2(const std::vector<double>& z, const std::vector<double>& t,
                                    const DiscreteDistribution1D& dist,
                                    const RockafellianConfig& cfg);

/// Disk-domain control problem with the oscillatory coefficient
/// a(x, xi) = 1/(xi + 3 sin(10 pi |x|)) and xi uniform on
/// [3.5 - delta, 3.5 + delta]. The xi-average is discretized by a Gauss rule
/// (8 nodes by default) with density rho = 1/(2 delta); the perturbation t
/// is collocated at the quadrature nodes, penalized by
/// (theta/2) sum_j w_j rho t_j^2, and must keep xi_j + t_j inside the
/// window. All spatial norms use the consistent P1 mass matrix.
///
/// States for the last evaluated (z, t) are kept so a gradient evaluated at
/// the same point reuses them and only pays the adjoint solves. Nothing is
/// cached across distinct points.
class Ex3Problem {
public:
    Ex3Problem(const DiskMesh2D& mesh, double delta, RockafellianConfig cfg, int n_xi = 8);

    const DiskMesh2D& mesh() const { return *mesh_; }
    const SparseSPDMatrix& mass() const { return *mass_; }
    const QuadratureRule& xi_rule() const { return rule_; }
    const RockafellianConfig& config() const { return cfg_; }
    double delta() const { return delta_; }
    double density() const { return rho_; }
    int n_xi() const { return static_cast<int>(rule_.nodes.size()); }

    /// Componentwise feasible range of t_j (the window minus the node).
    double t_lower(int j) const { return 3.5 - delta_ - rule_.nodes[j]; }
    double t_upper(int j) const { return 3.5 + delta_ - rule_.nodes[j]; }

    /// Clamp t into the window componentwise.
    std::vector<double> project_t(std::vector<double> t) const;

    /// Seed every CG solve with the last solution obtained for the same
    /// quadrature node. The linear solves still run to their usual relative
    /// tolerance, so values change only at that level; the iteration count
    /// drops sharply when successive (z, t) points are close, which is the
    /// situation inside a descent loop. Off by default so that repeated
    /// fresh evaluations stay bitwise reproducible.
    void reuse_state_guesses(bool enable);

    double objective(const std::vector<double>& z, const std::vector<double>& t) const;
    std::vector<double> grad_t(const std::vector<double>& z, const std::vector<double>& t) const;
    std::vector<double> grad_z(const std::vector<double>& z, const std::vector<double>& t) const;

    /// States u(., xi_j + t_j) at every quadrature node (full vertex
    /// vectors, boundary zeros included). Same single-point cache as the
    /// objective, so calling this right after objective(z, t) is free.
    const std::vector<std::vector<double>>& node_states(const std::vector<double>& z,
                                                        const std::vector<double>& t) const;

    /// a^T M b over all vertices.
    double mass_dot(const std::vector<double>& a, const std::vector<double>& b) const;

    /// Mass-matrix inner product for control fields (shares the matrix, so
    /// it stays valid after the problem object is destroyed).
    InnerProduct z_inner_product() const;

    /// Quadrature-weighted inner product for perturbation vectors
    /// (weights w_j rho).
    InnerProduct t_inner_product() const;

private:
    std::vector<double> coef_per_tri(int j, double tj) const;
    void check_zt(const std::vector<double>& z, const std::vector<double>& t) const;
    const std::vector<std::vector<double>>& states(const std::vector<double>& z,
                                                   const std::vector<double>& t) const;
    std::vector<double> adjoint_state(const std::vector<double>& u, const std::vector<double>& coef,
                                      int j) const;

    const DiskMesh2D* mesh_;
    P1Assembler assembler_;
    std::shared_ptr<SparseSPDMatrix> mass_;
    QuadratureRule rule_;
    double delta_ = 0.0;
    double rho_ = 0.0;
    RockafellianConfig cfg_;
    std::vector<double> sin_term_; // per-triangle 3 sin(10 pi |centroid|)

    mutable bool cache_valid_ = false;
    mutable std::vector<double> cache_z_, cache_t_;
    mutable std::vector<std::vector<double>> cache_states_;

    bool reuse_guesses_ = false;
    mutable std::vector<std::vector<double>> warm_state_;   // per node, free DOFs
    mutable std::vector<std::vector<double>> warm_adjoint_; // per node, free DOFs
};

double rock_objective_ex3(const Ex3Problem& prob, const std::vector<double>& z,
                          const std::vector<double>& t);
std::vector<double> rock_grad_t_ex3(const Ex3Problem& prob, const std::vector<double>& z,
                                    const std::vector<double>& t);
std::vector<double> rock_grad_z_ex3(const Ex3Problem& prob, const std::vector<double>& z,
                                    const std::vector<double>& t);

} // namespace rockrelax
