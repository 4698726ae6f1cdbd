#pragma once

// Brute-force and iterative reference solvers. None of these call the
// closed-form routines they are used to check.

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "cgame/core.hpp"

namespace cgame::oracles {

struct EnumeratedTopK {
    std::vector<Eigen::Index> support;  // ascending indices
    double value = 0.0;
};

/// Exhaustive search over all k-subsets of {0..n-1} for max sum omega*c_a.
/// Subsets are visited in lexicographic order and a later subset replaces the
/// incumbent only if it is better by more than a relative 1e-12, so exact ties
/// resolve to the lexicographically smallest support.
EnumeratedTopK enumerate_topk(const Vector& c, std::size_t k, double omega);

struct IterativeSolution {
    Vector w;
    std::size_t iterations = 0;
    double gradient_mapping_norm = 0.0;
    bool converged = false;
};

/// Accelerated projected gradient ascent (FISTA with gradient restart) on
/// w.c - (gamma/2)|w|^2 - (kappa/2)(sum w - rho)^2 over w >= 0.
/// Stops once the projected-gradient mapping norm is below tol * gamma.
IterativeSolution analog_conjugate_projected_gradient(const Vector& c, double gamma, double kappa, double rho,
                                                      double tol = 1e-9, std::size_t max_iterations = 5'000'000);

/// Central-difference gradient of f at w with step h.
Matrix central_difference(const std::function<double(const Matrix&)>& f, const Matrix& w, double h);

}  // namespace cgame::oracles
