#pragma once

// Data-parallel kernels. Every kernel has a serial reference implementation
// and an OpenMP implementation; both produce bitwise-identical results since
// work is split only along independent rows or columns.

#include <vector>

#include "cgame/core.hpp"
#include "cgame/dynamics.hpp"
#include "cgame/plasticity.hpp"

namespace cgame::kernels {

struct FeedforwardRule {
    double eta = 0.0;
    double kappa = 0.0;
    double rho = 0.0;
    double decay = 0.0;          // gamma; zero for the bounded rule
    double upper = 0.0;          // omega
    bool clamp_upper = true;
};

namespace serial {
UpdateReport update_feedforward(Matrix& w, const Vector& x, const Vector& u, const FeedforwardRule& rule);
std::vector<ActivityRecord> solve_columns(const Matrix& u, const NetworkState& state, double eps_l,
                                          const DynamicsConfig& cfg);
Matrix second_moments(const Matrix& a, const Matrix& b);
}  // namespace serial

namespace omp {
UpdateReport update_feedforward(Matrix& w, const Vector& x, const Vector& u, const FeedforwardRule& rule);
std::vector<ActivityRecord> solve_columns(const Matrix& u, const NetworkState& state, double eps_l,
                                          const DynamicsConfig& cfg);
Matrix second_moments(const Matrix& a, const Matrix& b);
}  // namespace omp

inline UpdateReport update_feedforward(Exec exec, Matrix& w, const Vector& x, const Vector& u,
                                       const FeedforwardRule& rule) {
    return exec == Exec::Parallel ? omp::update_feedforward(w, x, u, rule)
                                  : serial::update_feedforward(w, x, u, rule);
}

/// Rectified solve for every column of u with frozen weights.
inline std::vector<ActivityRecord> solve_columns(Exec exec, const Matrix& u, const NetworkState& state,
                                                 double eps_l, const DynamicsConfig& cfg) {
    return exec == Exec::Parallel ? omp::solve_columns(u, state, eps_l, cfg)
                                  : serial::solve_columns(u, state, eps_l, cfg);
}

/// A B^T / T where T is the shared column count.
inline Matrix second_moments(Exec exec, const Matrix& a, const Matrix& b) {
    return exec == Exec::Parallel ? omp::second_moments(a, b) : serial::second_moments(a, b);
}

int max_threads();

}  // namespace cgame::kernels
