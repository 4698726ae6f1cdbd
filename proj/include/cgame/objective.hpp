#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cgame/core.hpp"
#include "cgame/dynamics.hpp"
#include "cgame/plasticity.hpp"

namespace cgame {

struct ConjugateSolution {
    Vector w;                     // maximizing weight row, nonnegative
    double value = 0.0;           // conjugate value at c
    std::size_t k = 0;            // number of strictly positive entries of w
    std::optional<double> theta;  // KKT threshold (analog form only)
};

/// (kappa/2) sum_i (sum_a W_ia - rho)^2, plus (gamma/2) sum W_ia^2 for the analog variant.
double penalty_phi(const Matrix& w, const HyperParams& params);

/// Analytic gradient of penalty_phi.
Matrix penalty_gradient(const Matrix& w, const HyperParams& params);

/// Infinite-kappa conjugate over the box [0, omega] intersected with the simplex
/// sum w = rho. Requires rho / omega to be a positive integer k <= c.size();
/// selects the k largest entries (ties go to the lower index).
ConjugateSolution conjugate_topk(const Vector& c, double rho, double omega);

/// max_{w >= 0} w.c - (gamma/2)|w|^2 - (kappa/2)(sum w - rho)^2, solved in closed form
/// by the KKT threshold gamma w_a = [c_a - theta]^+.
ConjugateSolution conjugate_analog_kkt(const Vector& c, double gamma, double kappa, double rho);

/// The objective maximized by conjugate_analog_kkt, evaluated at an arbitrary w.
double analog_row_objective(const Vector& w, const Vector& c, double gamma, double kappa, double rho);

/// Largest violation of the stationarity / complementarity conditions for the
/// analog conjugate at w: for w_a > 0 the gradient component must vanish, for
/// w_a = 0 it must be nonpositive.
double analog_kkt_residual(const Vector& w, const Vector& c, double gamma, double kappa, double rho);

/// Infinite-kappa elimination criterion: rho*gamma < sum(c) - N*min(c).
bool elimination_trigger(const Vector& c, double gamma, double rho);

/// Row-wise conjugate for the variant (top-k for bounded and sigmoid, KKT for analog).
ConjugateSolution conjugate_row(const Vector& c, const HyperParams& params);

struct PayoffResult {
    double value = 0.0;
    std::size_t nonconverged = 0;
    Matrix x;  // inner maximizer, n_outputs x T
};

/// R(W, L): the inner maximization over X is carried out column by column with
/// the rectified dynamics.
PayoffResult payoff(const Matrix& w, const Matrix& l, const Matrix& u, const HyperParams& params,
                    const DynamicsConfig& cfg, Exec exec = Exec::Serial);

/// Payoff integrand for a fixed X (no inner maximization):
/// mean_t [sum W X U - Phi(W) - 1/2 sum L (X X - D)].
double lagrangian(const Matrix& w, const Matrix& l, const Matrix& x, const Matrix& u,
                  const HyperParams& params);

struct PrimalResult {
    double value = 0.0;
    Matrix violations;  // max(X X^T / T - D, 0)
};

PrimalResult primal_objective(const Matrix& x, const Matrix& u, const HyperParams& params);

struct ProjectionCheck {
    double value = 0.0;  // q * sqrt(<(w.u)^2>)
    Vector x;            // maximizing output series
};

/// Single-output inner maximum: max (1/T) sum_t x_t (w.u_t) subject to <x^2> <= q^2.
ProjectionCheck single_neuron_projection_check(const Matrix& u, const Vector& w, double q);

}  // namespace cgame
