#include "cgame/plasticity.hpp"

#include <algorithm>
#include <cmath>

#include "cgame/kernels.hpp"

namespace cgame {

UpdateReport& UpdateReport::operator+=(const UpdateReport& other) {
    n_clamped_low += other.n_clamped_low;
    n_clamped_high += other.n_clamped_high;
    n_l_rectified += other.n_l_rectified;
    max_delta_w = std::max(max_delta_w, other.max_delta_w);
    max_delta_l = std::max(max_delta_l, other.max_delta_l);
    return *this;
}

namespace {

void check_shapes(const NetworkState& state, const Vector& x, const Vector* u) {
    if (x.size() != state.w.rows())
        throw Error(ErrorCode::DimensionMismatch, "activity vector does not match n_outputs");
    if (u && u->size() != state.w.cols())
        throw Error(ErrorCode::DimensionMismatch, "input vector does not match n_inputs");
}

}  // namespace

UpdateReport update_w_bounded(NetworkState& state, const Vector& x, const Vector& u,
                              const HyperParams& params, Exec exec) {
    check_shapes(state, x, &u);
    kernels::FeedforwardRule rule;
    rule.eta = params.eta_w;
    rule.kappa = params.kappa;
    rule.rho = params.rho;
    rule.decay = 0.0;
    rule.upper = params.omega;
    rule.clamp_upper = true;
    return kernels::update_feedforward(exec, state.w, x, u, rule);
}

UpdateReport update_w_analog(NetworkState& state, const Vector& x, const Vector& u,
                             const HyperParams& params, Exec exec) {
    check_shapes(state, x, &u);
    kernels::FeedforwardRule rule;
    rule.eta = params.eta_w;
    rule.kappa = params.kappa;
    rule.rho = params.rho;
    rule.decay = params.gamma;
    rule.clamp_upper = false;
    return kernels::update_feedforward(exec, state.w, x, u, rule);
}

UpdateReport update_l_offdiag(NetworkState& state, const Vector& x, const HyperParams& params) {
    check_shapes(state, x, nullptr);
    UpdateReport rep;
    const double target = params.p * params.p;
    Matrix& l = state.l;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < l.cols(); ++j) {
            const double old = l(i, j);
            double v = old + params.eta_l * (x(i) * x(j) - target);
            if (v < 0.0) {
                v = 0.0;
                ++rep.n_l_rectified;
            }
            rep.max_delta_l = std::max(rep.max_delta_l, std::abs(v - old));
            l(i, j) = v;
            l(j, i) = v;
        }
    }
    return rep;
}

UpdateReport update_l_diag(NetworkState& state, const Vector& x, const HyperParams& params) {
    check_shapes(state, x, nullptr);
    UpdateReport rep;
    const double target = params.q * params.q;
    for (Eigen::Index i = 0; i < state.l.rows(); ++i) {
        const double old = state.l(i, i);
        double v = old + params.eta_l * (x(i) * x(i) - target);
        if (v < params.eps_l) {
            v = params.eps_l;
            ++rep.n_l_rectified;
        }
        rep.max_delta_l = std::max(rep.max_delta_l, std::abs(v - old));
        state.l(i, i) = v;
    }
    return rep;
}

UpdateReport update_theta(NetworkState& state, const Vector& x, const HyperParams& params) {
    if (params.variant != Variant::Sigmoid)
        throw Error(ErrorCode::VariantMismatch, "threshold update applies only to the sigmoid variant");
    check_shapes(state, x, nullptr);
    const double eta = params.threshold_rate();
    for (Eigen::Index i = 0; i < state.theta.size(); ++i) state.theta(i) += eta * (x(i) - params.p);
    return {};
}

UpdateReport apply_plasticity(NetworkState& state, const Vector& x, const Vector& u,
                              const HyperParams& params, Exec exec) {
    UpdateReport rep;
    if (params.variant == Variant::RectifiedAnalog)
        rep += update_w_analog(state, x, u, params, exec);
    else
        rep += update_w_bounded(state, x, u, params, exec);
    rep += update_l_offdiag(state, x, params);
    if (params.variant == Variant::Sigmoid)
        rep += update_theta(state, x, params);
    else
        rep += update_l_diag(state, x, params);
    ++state.step;
    return rep;
}

}  // namespace cgame
