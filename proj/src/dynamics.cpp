#include "cgame/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace cgame {

void DynamicsConfig::validate() const {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "dynamics tol must be > 0");
    if (max_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "dynamics max_sweeps must be >= 1");
}

namespace {

class SweepSchedule {
public:
    SweepSchedule(Eigen::Index n, const DynamicsConfig& cfg)
        : order_(static_cast<std::size_t>(n)), shuffle_(cfg.order == SweepOrder::RandomPermutation),
          rng_(cfg.seed) {
        std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    }

    const std::vector<Eigen::Index>& next() {
        if (shuffle_) std::shuffle(order_.begin(), order_.end(), rng_);
        return order_;
    }

private:
    std::vector<Eigen::Index> order_;
    bool shuffle_;
    std::mt19937_64 rng_;
};

double lateral_input(const Matrix& l, const Vector& x, Eigen::Index i) {
    return l.row(i).dot(x) - l(i, i) * x(i);
}

}  // namespace

double rectified_fixed_point_residual(const Vector& x, const Vector& drive, const Matrix& l) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double target = std::max(drive(i) - lateral_input(l, x, i), 0.0) / l(i, i);
        worst = std::max(worst, std::abs(x(i) - target));
    }
    return worst;
}

double activity_objective(const Vector& x, const Vector& drive, const Matrix& l) {
    return x.dot(drive) - 0.5 * x.dot(l * x);
}

ActivityRecord solve_rectified_drive(const Vector& drive, const Matrix& l, double eps_l,
                                     const DynamicsConfig& cfg, SolveTrace* trace) {
    const Eigen::Index n = drive.size();
    if (l.rows() != n || l.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "L does not match the number of outputs");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(l(i, i) >= eps_l)) {
            std::ostringstream os;
            os << "L(" << i << "," << i << ") = " << l(i, i) << " is below the floor " << eps_l;
            throw Error(ErrorCode::NonPositiveDiagonal, os.str());
        }
    }

    ActivityRecord rec;
    rec.x = Vector::Zero(n);
    SweepSchedule schedule(n, cfg);
    if (trace) trace->objective.clear();

    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index i : schedule.next()) {
            const double updated = std::max(drive(i) - lateral_input(l, rec.x, i), 0.0) / l(i, i);
            max_change = std::max(max_change, std::abs(updated - rec.x(i)));
            rec.x(i) = updated;
        }
        rec.sweeps_used = sweep;
        rec.residual = max_change;
        if (trace) trace->objective.push_back(activity_objective(rec.x, drive, l));
        if (max_change <= cfg.tol) {
            const double fp = rectified_fixed_point_residual(rec.x, drive, l);
            if (fp <= cfg.tol) {
                rec.residual = fp;
                rec.converged = true;
                break;
            }
        }
    }
    return rec;
}

ActivityRecord solve_rectified(const Vector& u, const NetworkState& state, double eps_l,
                               const DynamicsConfig& cfg, SolveTrace* trace) {
    if (u.size() != state.w.cols())
        throw Error(ErrorCode::DimensionMismatch, "input vector does not match W columns");
    const Vector drive = state.w * u;
    return solve_rectified_drive(drive, state.l, eps_l, cfg, trace);
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

ActivityRecord solve_sigmoid(const Vector& u, const NetworkState& state, const DynamicsConfig& cfg,
                             const Squash& f) {
    if (u.size() != state.w.cols())
        throw Error(ErrorCode::DimensionMismatch, "input vector does not match W columns");
    const Eigen::Index n = state.w.rows();
    const Vector drive = state.w * u - state.theta;
    const Matrix& l = state.l;

    auto target = [&](const Vector& x, Eigen::Index i) { return f(drive(i) - lateral_input(l, x, i)); };

    ActivityRecord rec;
    rec.x = Vector::Zero(n);
    SweepSchedule schedule(n, cfg);
    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index i : schedule.next()) {
            const double updated = target(rec.x, i);
            max_change = std::max(max_change, std::abs(updated - rec.x(i)));
            rec.x(i) = updated;
        }
        rec.sweeps_used = sweep;
        rec.residual = max_change;
        if (max_change <= cfg.tol) {
            double fp = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) fp = std::max(fp, std::abs(rec.x(i) - target(rec.x, i)));
            if (fp <= cfg.tol) {
                rec.residual = fp;
                rec.converged = true;
                break;
            }
        }
    }
    return rec;
}

CopositivityResult check_copositivity(const Matrix& l, double eps_l) {
    CopositivityResult res;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        for (Eigen::Index j = 0; j < l.cols(); ++j) {
            const double v = l(i, j);
            const bool bad = (i == j) ? !(v >= eps_l) : !(v >= 0.0);
            if (bad) {
                res.copositive = false;
                res.witness = CopositivityWitness{i, j, v};
                return res;
            }
        }
    }
    return res;
}

}  // namespace cgame
