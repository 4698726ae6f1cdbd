#include "cgame/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cgame/kernels.hpp"

namespace cgame {

double penalty_phi(const Matrix& w, const HyperParams& params) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const double excess = w.row(i).sum() - params.rho;
        total += 0.5 * params.kappa * excess * excess;
    }
    if (params.variant == Variant::RectifiedAnalog) total += 0.5 * params.gamma * w.squaredNorm();
    return total;
}

Matrix penalty_gradient(const Matrix& w, const HyperParams& params) {
    Matrix g(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        g.row(i).setConstant(params.kappa * (w.row(i).sum() - params.rho));
    if (params.variant == Variant::RectifiedAnalog) g += params.gamma * w;
    return g;
}

namespace {

// Indices sorted by descending value; equal values keep ascending index order.
std::vector<Eigen::Index> descending_order(const Vector& c) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(c.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return c(a) > c(b); });
    return idx;
}

std::size_t count_positive(const Vector& w) {
    return static_cast<std::size_t>((w.array() > 0.0).count());
}

}  // namespace

ConjugateSolution conjugate_topk(const Vector& c, double rho, double omega) {
    if (c.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty correlation vector");
    if (!(omega > 0.0) || !(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho and omega must be > 0");
    const double ratio = rho / omega;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 || rounded < 1.0) {
        std::ostringstream os;
        os << "rho/omega = " << ratio << " is not a positive integer";
        throw Error(ErrorCode::NonIntegralRatio, os.str());
    }
    const auto k = static_cast<std::size_t>(rounded);
    if (k > static_cast<std::size_t>(c.size())) {
        std::ostringstream os;
        os << "rho/omega = " << k << " exceeds the number of inputs " << c.size();
        throw Error(ErrorCode::InvalidArgument, os.str());
    }

    const auto order = descending_order(c);
    ConjugateSolution sol;
    sol.w = Vector::Zero(c.size());
    for (std::size_t r = 0; r < k; ++r) sol.w(order[r]) = omega;
    // Summed in index order so the value is reproducible from the support alone.
    for (Eigen::Index a = 0; a < c.size(); ++a)
        if (sol.w(a) > 0.0) sol.value += sol.w(a) * c(a);
    sol.k = k;
    return sol;
}

double analog_row_objective(const Vector& w, const Vector& c, double gamma, double kappa, double rho) {
    const double excess = w.sum() - rho;
    return w.dot(c) - 0.5 * gamma * w.squaredNorm() - 0.5 * kappa * excess * excess;
}

double analog_kkt_residual(const Vector& w, const Vector& c, double gamma, double kappa, double rho) {
    const double competition = kappa * (w.sum() - rho);
    double worst = 0.0;
    for (Eigen::Index a = 0; a < w.size(); ++a) {
        const double g = c(a) - gamma * w(a) - competition;
        worst = std::max(worst, w(a) > 0.0 ? std::abs(g) : std::max(g, 0.0));
        if (w(a) < 0.0) worst = std::max(worst, -w(a));
    }
    return worst;
}

ConjugateSolution conjugate_analog_kkt(const Vector& c, double gamma, double kappa, double rho) {
    if (c.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty correlation vector");
    if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be > 0");
    if (!(kappa >= 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be >= 0");
    if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be > 0");

    ConjugateSolution sol;
    if (kappa == 0.0) {
        // No competition: each synapse independently solves max w c - gamma w^2 / 2.
        sol.theta = 0.0;
        sol.w = c.cwiseMax(0.0) / gamma;
    } else {
        const auto order = descending_order(c);
        const auto n = order.size();
        const double ratio = gamma / kappa;
        auto sorted = [&](std::size_t r) { return c(order[r]); };  // r is 0-based rank

        std::optional<std::size_t> chosen;
        double chosen_theta = 0.0;
        double prefix = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            if (k > 0) prefix += sorted(k - 1);
            const double theta = (prefix - rho * gamma) / (static_cast<double>(k) + ratio);
            const bool top_survives = (k == 0) || sorted(k - 1) > theta;
            const bool rest_eliminated = (k == n) || theta >= sorted(k);
            if (!(top_survives && rest_eliminated)) continue;
            if (!chosen) {
                chosen = k;
                chosen_theta = theta;
            } else if (std::abs(theta - chosen_theta) > 1e-12 * (1.0 + std::abs(theta))) {
                // Two distinct thresholds both satisfy the survival inequality.
                std::ostringstream os;
                os << "ambiguous KKT support: k=" << *chosen << " and k=" << k;
                throw Error(ErrorCode::Internal, os.str());
            }
        }
        if (!chosen) throw Error(ErrorCode::Internal, "no KKT support size satisfies the survival inequality");
        sol.theta = chosen_theta;
        sol.w = (c.array() - chosen_theta).max(0.0).matrix() / gamma;
    }
    sol.k = count_positive(sol.w);
    sol.value = analog_row_objective(sol.w, c, gamma, kappa, rho);
    return sol;
}

bool elimination_trigger(const Vector& c, double gamma, double rho) {
    if (c.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty correlation vector");
    const double spread = c.sum() - static_cast<double>(c.size()) * c.minCoeff();
    return rho * gamma < spread;
}

ConjugateSolution conjugate_row(const Vector& c, const HyperParams& params) {
    if (params.variant == Variant::RectifiedAnalog)
        return conjugate_analog_kkt(c, params.gamma, params.kappa, params.rho);
    return conjugate_topk(c, params.rho, params.omega);
}

double lagrangian(const Matrix& w, const Matrix& l, const Matrix& x, const Matrix& u,
                  const HyperParams& params) {
    if (x.cols() != u.cols() || w.rows() != x.rows() || w.cols() != u.rows())
        throw Error(ErrorCode::DimensionMismatch, "lagrangian: inconsistent shapes");
    const double inv_t = 1.0 / static_cast<double>(x.cols());
    const Matrix c = (x * u.transpose()) * inv_t;
    const Matrix xx = (x * x.transpose()) * inv_t;
    const Matrix d = build_constraint_matrix(params, static_cast<std::size_t>(x.rows()));
    return (w.array() * c.array()).sum() - penalty_phi(w, params) -
           0.5 * (l.array() * (xx - d).array()).sum();
}

PayoffResult payoff(const Matrix& w, const Matrix& l, const Matrix& u, const HyperParams& params,
                    const DynamicsConfig& cfg, Exec exec) {
    const auto cop = check_copositivity(l, params.eps_l);
    if (!cop.copositive) {
        std::ostringstream os;
        os << "payoff requires copositive L; violation at (" << cop.witness->row << "," << cop.witness->col << ")";
        throw Error(ErrorCode::InvariantViolation, os.str());
    }
    NetworkState state;
    state.w = w;
    state.l = l;
    state.theta = Vector::Zero(w.rows());
    const auto records = kernels::solve_columns(exec, u, state, params.eps_l, cfg);

    PayoffResult res;
    res.x.resize(w.rows(), u.cols());
    double integrand = 0.0;
    for (Eigen::Index t = 0; t < u.cols(); ++t) {
        const auto& rec = records[static_cast<std::size_t>(t)];
        res.x.col(t) = rec.x;
        if (!rec.converged) ++res.nonconverged;
        integrand += activity_objective(rec.x, w * u.col(t), l);
    }
    const Matrix d = build_constraint_matrix(params, static_cast<std::size_t>(w.rows()));
    res.value = integrand / static_cast<double>(u.cols()) - penalty_phi(w, params) +
                0.5 * (l.array() * d.array()).sum();
    return res;
}

PrimalResult primal_objective(const Matrix& x, const Matrix& u, const HyperParams& params) {
    if (x.cols() != u.cols() || x.cols() == 0)
        throw Error(ErrorCode::DimensionMismatch, "X and U must share a nonzero step count");
    const double inv_t = 1.0 / static_cast<double>(x.cols());
    const Matrix c = (x * u.transpose()) * inv_t;
    const Matrix xx = (x * x.transpose()) * inv_t;
    const Matrix d = build_constraint_matrix(params, static_cast<std::size_t>(x.rows()));
    PrimalResult res;
    for (Eigen::Index i = 0; i < c.rows(); ++i) res.value += conjugate_row(c.row(i).transpose(), params).value;
    res.violations = (xx - d).cwiseMax(0.0);
    return res;
}

ProjectionCheck single_neuron_projection_check(const Matrix& u, const Vector& w, double q) {
    if (w.size() != u.rows()) throw Error(ErrorCode::DimensionMismatch, "w must have one entry per input");
    if (!(q > 0.0)) throw Error(ErrorCode::InvalidArgument, "q must be > 0");
    if ((w.array() < 0.0).any() || (u.array() < 0.0).any())
        throw Error(ErrorCode::InvalidArgument, "projection check requires nonnegative w and U");
    const Vector proj = u.transpose() * w;
    const double t = static_cast<double>(u.cols());
    const double second_moment = proj.squaredNorm() / t;
    ProjectionCheck out;
    out.value = q * std::sqrt(second_moment);
    if (second_moment == 0.0) {
        out.x = Vector::Zero(u.cols());
        return out;
    }
    out.x = (q / std::sqrt(second_moment)) * proj;
    const double attained = out.x.dot(proj) / t;
    if (std::abs(attained - out.value) > 1e-9 * (1.0 + std::abs(out.value)))
        throw Error(ErrorCode::Internal, "projection maximizer does not attain the closed-form value");
    return out;
}

}  // namespace cgame
