#pragma once

#include <cstddef>

#include "cgame/core.hpp"

namespace cgame {

enum class Exec { Serial, Parallel };

struct UpdateReport {
    std::size_t n_clamped_low = 0;   // W entries rectified at 0
    std::size_t n_clamped_high = 0;  // W entries clamped at omega
    std::size_t n_l_rectified = 0;   // off-diagonal L entries rectified at 0 (or diagonal floored)
    double max_delta_w = 0.0;
    double max_delta_l = 0.0;

    UpdateReport& operator+=(const UpdateReport& other);
};

/// W_ia += eta_w [x_i u_a - kappa (sum_b W_ib - rho)], then clamp to [0, omega].
UpdateReport update_w_bounded(NetworkState& state, const Vector& x, const Vector& u,
                              const HyperParams& params, Exec exec = Exec::Serial);

/// W_ia += eta_w [x_i u_a - gamma W_ia - kappa (sum_b W_ib - rho)], then rectify at 0.
UpdateReport update_w_analog(NetworkState& state, const Vector& x, const Vector& u,
                             const HyperParams& params, Exec exec = Exec::Serial);

/// Anti-Hebbian lateral rule. Each unordered pair is updated once and mirrored,
/// so L stays bitwise symmetric.
UpdateReport update_l_offdiag(NetworkState& state, const Vector& x, const HyperParams& params);

/// Homeostatic diagonal rule with the diagonal floored at eps_l.
UpdateReport update_l_diag(NetworkState& state, const Vector& x, const HyperParams& params);

/// theta_i += eta_theta (x_i - p). Sigmoid variant only.
UpdateReport update_theta(NetworkState& state, const Vector& x, const HyperParams& params);

/// One full plasticity step for the configured variant, in the order
/// W, off-diagonal L, then diagonal L (or thresholds for the sigmoid variant).
UpdateReport apply_plasticity(NetworkState& state, const Vector& x, const Vector& u,
                              const HyperParams& params, Exec exec = Exec::Serial);

}  // namespace cgame
