#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cgame/core.hpp"

namespace cgame {

enum class SweepOrder { Cyclic, RandomPermutation };

struct DynamicsConfig {
    double tol = 1e-6;
    int max_sweeps = 100;
    SweepOrder order = SweepOrder::Cyclic;
    std::uint64_t seed = 0;       // only used with RandomPermutation
    bool record_objective = false;

    void validate() const;
};

struct SolveTrace {
    // Activity objective after each completed sweep.
    std::vector<double> objective;
};

/// Gauss-Seidel coordinate ascent on the rectified network:
///   x_i <- [ (W u)_i - sum_{j != i} L_ij x_j ]^+ / L_ii
/// starting from x = 0. Convergence requires both the last sweep's max change
/// and the fixed-point residual to be within cfg.tol; otherwise the record is
/// returned with converged = false after cfg.max_sweeps sweeps.
ActivityRecord solve_rectified(const Vector& u, const NetworkState& state, double eps_l,
                               const DynamicsConfig& cfg, SolveTrace* trace = nullptr);

/// Same iteration with the feedforward drive already computed (drive = W u).
ActivityRecord solve_rectified_drive(const Vector& drive, const Matrix& l, double eps_l,
                                     const DynamicsConfig& cfg, SolveTrace* trace = nullptr);

using Squash = std::function<double(double)>;

double logistic(double z);

/// x_i <- f((W u)_i - sum_{j != i} L_ij x_j - theta_i), Gauss-Seidel from x = 0.
ActivityRecord solve_sigmoid(const Vector& u, const NetworkState& state, const DynamicsConfig& cfg,
                             const Squash& f = logistic);

/// max_i |x_i - [drive_i - sum_{j != i} L_ij x_j]^+ / L_ii|.
double rectified_fixed_point_residual(const Vector& x, const Vector& drive, const Matrix& l);

/// x . drive - (1/2) x^T L x, the part of the payoff integrand that depends on x.
double activity_objective(const Vector& x, const Vector& drive, const Matrix& l);

struct CopositivityWitness {
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    double value = 0.0;
};

struct CopositivityResult {
    bool copositive = true;
    std::optional<CopositivityWitness> witness;
};

/// Sufficient test: off-diagonal >= 0 and diagonal >= eps_l.
CopositivityResult check_copositivity(const Matrix& l, double eps_l);

}  // namespace cgame
