#include "cgame/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "cgame/kernels.hpp"
#include "cgame/metrics.hpp"
#include "cgame/oracles.hpp"

namespace cgame::verify {

namespace {

using Rng = std::mt19937_64;

std::uint64_t suite_seed(std::uint64_t seed, std::uint64_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(uniform(rng, std::log(lo), std::log(hi))); }

Vector random_vector(Rng& rng, std::size_t n, double lo, double hi) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = uniform(rng, lo, hi);
    return v;
}

// Records a failure and keeps the first description.
void fail(SuiteResult& r, const std::string& what) {
    if (r.failures++ == 0) r.first_failure = what;
}

void track(SuiteResult& r, double value) { r.worst = std::max(r.worst, value); }

template <typename F>
bool guarded(SuiteResult& r, std::size_t instance, F&& body) {
    try {
        body();
        return true;
    } catch (const std::exception& e) {
        std::ostringstream os;
        os << "instance " << instance << ": exception: " << e.what();
        fail(r, os.str());
        return false;
    }
}

}  // namespace

SuiteResult kkt_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers) {
    SuiteResult r{"kkt-vs-projected-gradient", 0, 0, "max(sup|w - w_oracle|, kkt residual)", 0.0, 1e-6, {}};
    Rng rng(suite_seed(seed, 1));
    double worst_residual = 0.0;
    for (std::size_t inst = 0; inst < sizes.kkt_instances; ++inst) {
        const std::size_t n = uniform_int(rng, 1, sizes.kkt_max_n);
        const Vector c = random_vector(rng, n, -0.5, 2.0);
        const double gamma = log_uniform(rng, 0.05, 2.0);
        const double kappa = log_uniform(rng, 0.1, 10.0);
        const double rho = uniform(rng, 0.2, 2.0);
        ++r.instances;
        guarded(r, inst, [&] {
            const auto sol = solvers.analog(c, gamma, kappa, rho);
            const auto ref = oracles::analog_conjugate_projected_gradient(c, gamma, kappa, rho);
            std::ostringstream os;
            os << "instance " << inst << " (n=" << n << ", gamma=" << gamma << ", kappa=" << kappa << ", rho=" << rho
               << "): ";
            if (!ref.converged) {
                fail(r, os.str() + "oracle did not converge");
                return;
            }
            const double diff = (sol.w - ref.w).cwiseAbs().maxCoeff();
            const double residual = analog_kkt_residual(sol.w, c, gamma, kappa, rho);
            const double objective = analog_row_objective(sol.w, c, gamma, kappa, rho);
            // Closed form of the optimal value from the threshold.
            double closed = 0.0;
            if (sol.theta) {
                const double th = *sol.theta;
                for (Eigen::Index a = 0; a < c.size(); ++a)
                    if (c(a) > th) closed += c(a) * c(a) - th * th;
                closed = (closed - (gamma / kappa) * th * th) / (2.0 * gamma);
            }
            const double value_err = std::abs(sol.value - objective);
            const double closed_err = sol.theta ? std::abs(closed - sol.value) : 0.0;
            track(r, diff);
            worst_residual = std::max(worst_residual, residual);
            if (diff >= 1e-6) fail(r, os.str() + "sup-norm difference " + std::to_string(diff));
            if (residual >= 1e-8) fail(r, os.str() + "KKT residual " + std::to_string(residual));
            if (value_err > 1e-9 * (1.0 + std::abs(objective)) || closed_err > 1e-9 * (1.0 + std::abs(objective)))
                fail(r, os.str() + "reported value disagrees with the objective");
            if (sol.k != static_cast<std::size_t>((sol.w.array() > 0.0).count()))
                fail(r, os.str() + "reported k does not match the support");
        });
    }
    r.metric = "sup|w - w_oracle| (worst KKT residual " + [&] {
        std::ostringstream os;
        os << std::scientific << std::setprecision(2) << worst_residual;
        return os.str();
    }() + ")";
    return r;
}

SuiteResult topk_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers) {
    SuiteResult r{"topk-vs-enumeration", 0, 0, "|value - enumerated value|", 0.0, 0.0, {}};
    Rng rng(suite_seed(seed, 2));
    for (std::size_t inst = 0; inst < sizes.topk_vectors; ++inst) {
        const std::size_t n = uniform_int(rng, 1, sizes.topk_max_n);
        Vector c(static_cast<Eigen::Index>(n));
        // A third of the vectors draw from a small integer grid so ties are common.
        const bool tied = inst % 3 == 0;
        for (auto& v : c) v = tied ? static_cast<double>(uniform_int(rng, 0, 3)) : uniform(rng, -1.0, 1.0);
        const double omega = log_uniform(rng, 0.05, 2.0);
        for (std::size_t k = 1; k <= n; ++k) {
            ++r.instances;
            guarded(r, inst, [&] {
                const double rho = static_cast<double>(k) * omega;
                const auto sol = solvers.topk(c, rho, omega);
                const auto ref = oracles::enumerate_topk(c, k, omega);
                std::vector<Eigen::Index> support;
                for (Eigen::Index a = 0; a < sol.w.size(); ++a)
                    if (sol.w(a) != 0.0) support.push_back(a);
                bool exact = support == ref.support && sol.value == ref.value && sol.k == k;
                for (Eigen::Index a : support) exact = exact && sol.w(a) == omega;
                track(r, std::abs(sol.value - ref.value));
                if (!exact) {
                    std::ostringstream os;
                    os << "vector " << inst << ", n=" << n << ", k=" << k << ": support or value differs";
                    fail(r, os.str());
                }
            });
        }
    }
    return r;
}

SuiteResult trigger_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers) {
    SuiteResult r{"elimination-trigger", 0, 0, "mismatches", 0.0, 0.0, {}};
    Rng rng(suite_seed(seed, 3));
    const double kappa = 1e6;
    for (std::size_t inst = 0; inst < sizes.trigger_instances; ++inst) {
        const std::size_t n = uniform_int(rng, 2, 8);
        const Vector c = random_vector(rng, n, 0.0, 1.0);
        const double gamma = log_uniform(rng, 0.05, 2.0);
        const double rho = uniform(rng, 0.1, 4.0);
        ++r.instances;
        guarded(r, inst, [&] {
            const bool predicted = elimination_trigger(c, gamma, rho);
            const auto sol = solvers.analog(c, gamma, kappa, rho);
            const bool eliminated = sol.k < n;
            if (predicted != eliminated) {
                r.worst += 1.0;
                std::ostringstream os;
                os << "instance " << inst << ": trigger=" << predicted << " but k=" << sol.k << " of " << n;
                fail(r, os.str());
            }
        });
    }
    return r;
}

SuiteResult frobenius_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers) {
    SuiteResult r{"frobenius-limit", 0, 0, "|2 gamma value - sum c^2|", 0.0, 1e-9, {}};
    Rng rng(suite_seed(seed, 4));
    for (std::size_t inst = 0; inst < sizes.frobenius_instances; ++inst) {
        const std::size_t n = uniform_int(rng, 1, 8);
        const Vector c = random_vector(rng, n, 0.0, 1.0);
        const double gamma = log_uniform(rng, 0.05, 2.0);
        const double rho = uniform(rng, 0.1, 4.0);
        ++r.instances;
        guarded(r, inst, [&] {
            const auto sol = solvers.analog(c, gamma, 0.0, rho);
            const double err = std::abs(2.0 * gamma * sol.value - c.squaredNorm());
            track(r, err);
            if (!(err < 1e-9)) fail(r, "instance " + std::to_string(inst) + ": error " + std::to_string(err));
        });
    }
    return r;
}

SuiteResult gradient_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers) {
    SuiteResult r{"penalty-gradient", 0, 0, "relative error vs central differences", 0.0, 1e-5, {}};
    Rng rng(suite_seed(seed, 5));
    for (std::size_t inst = 0; inst < sizes.gradient_draws; ++inst) {
        for (Variant v : {Variant::RectifiedBounded, Variant::RectifiedAnalog}) {
            HyperParams params;
            params.variant = v;
            params.kappa = log_uniform(rng, 0.1, 10.0);
            params.rho = uniform(rng, 0.2, 2.0);
            params.gamma = log_uniform(rng, 0.05, 2.0);
            params.omega = 1.0;
            params.eta_w = 1e-7;
            const auto rows = static_cast<Eigen::Index>(uniform_int(rng, 1, 4));
            const auto cols = static_cast<Eigen::Index>(uniform_int(rng, 1, 6));
            Matrix w(rows, cols);
            for (auto& x : w.reshaped()) x = uniform(rng, 0.2, 0.8);
            ++r.instances;
            guarded(r, inst, [&] {
                const Matrix fd = oracles::central_difference(
                    [&](const Matrix& m) { return penalty_phi(m, params); }, w, 1e-6);
                const double scale = std::max(fd.norm(), 1e-12);
                const double analytic_err = (solvers.gradient(w, params) - fd).norm() / scale;

                // The deterministic part of the feedforward rule (no activity) must be -eta_w times the gradient.
                Matrix stepped = w;
                kernels::FeedforwardRule rule{params.eta_w, params.kappa, params.rho,
                                              v == Variant::RectifiedAnalog ? params.gamma : 0.0, params.omega,
                                              v != Variant::RectifiedAnalog};
                kernels::serial::update_feedforward(stepped, Vector::Zero(rows), Vector::Zero(cols), rule);
                const Matrix implied = (w - stepped) / params.eta_w;
                const double rule_err = (implied - fd).norm() / scale;

                const double err = std::max(analytic_err, rule_err);
                track(r, err);
                if (!(err < 1e-5)) {
                    std::ostringstream os;
                    os << "draw " << inst << " (" << to_string(v) << "): analytic " << analytic_err << ", rule "
                       << rule_err;
                    fail(r, os.str());
                }
            });
        }
    }
    return r;
}

SuiteResult dynamics_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers) {
    SuiteResult r{"dynamics-contract", 0, 0, "fixed-point residual of converged solves", 0.0, 1e-6, {}};
    Rng rng(suite_seed(seed, 6));
    const double eps_l = 1e-3;
    DynamicsConfig cfg;
    cfg.record_objective = true;
    cfg.max_sweeps = 500;
    for (std::size_t inst = 0; inst < sizes.dynamics_instances; ++inst) {
        const auto n = static_cast<Eigen::Index>(uniform_int(rng, 1, 10));
        Matrix l(n, n);
        const double coupling = log_uniform(rng, 0.01, 2.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            l(i, i) = log_uniform(rng, eps_l, 2.0);
            for (Eigen::Index j = 0; j < i; ++j) l(i, j) = l(j, i) = coupling * uniform(rng, 0.0, 1.0);
        }
        const Vector drive = random_vector(rng, static_cast<std::size_t>(n), -0.5, 1.5);
        cfg.order = inst % 2 ? SweepOrder::RandomPermutation : SweepOrder::Cyclic;
        cfg.seed = inst;
        ++r.instances;
        guarded(r, inst, [&] {
            SolveTrace trace;
            const auto rec = solvers.rectified(drive, l, eps_l, cfg, &trace);
            std::ostringstream os;
            os << "instance " << inst << " (n=" << n << "): ";
            const double residual = rectified_fixed_point_residual(rec.x, drive, l);
            if (rec.converged) {
                track(r, residual);
                if (residual > 1e-6) fail(r, os.str() + "converged with residual " + std::to_string(residual));
            }
            double previous = 0.0;  // objective at x = 0
            for (double value : trace.objective) {
                if (value < previous - 1e-10 * (1.0 + std::abs(previous)))
                    fail(r, os.str() + "objective decreased across a sweep");
                previous = value;
            }
            const double bound = std::max(drive.maxCoeff(), 0.0) / eps_l;
            if ((rec.x.array() < 0.0).any()) fail(r, os.str() + "negative activity");
            if (rec.x.maxCoeff() > bound * (1.0 + 1e-12)) fail(r, os.str() + "activity exceeds max drive / eps_l");
        });
    }
    return r;
}

// ---- duality search --------------------------------------------------------

namespace {

double primal_value(const Matrix& x, const Matrix& u, const HyperParams& params, const Solvers& solvers) {
    const Matrix c = (x * u.transpose()) / static_cast<double>(u.cols());
    double total = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        total += solvers.analog(c.row(i).transpose(), params.gamma, params.kappa, params.rho).value;
    return total;
}

// Largest s with (s X)(s X)^T / T <= D entrywise.
double feasible_scale(const Matrix& x, const Matrix& d) {
    const Matrix m = (x * x.transpose()) / static_cast<double>(x.cols());
    double s = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) > 0.0) s = std::min(s, std::sqrt(d(i, j) / m(i, j)));
    return s;
}

Matrix scale_to_boundary(const Matrix& x, const Matrix& d) {
    const double s = feasible_scale(x, d);
    return std::isfinite(s) ? Matrix(s * x) : x;
}

Matrix optimal_w(const Matrix& x, const Matrix& u, const HyperParams& params, const Solvers& solvers) {
    const Matrix c = (x * u.transpose()) / static_cast<double>(u.cols());
    Matrix w(c.rows(), c.cols());
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        w.row(i) = solvers.analog(c.row(i).transpose(), params.gamma, params.kappa, params.rho).w.transpose();
    return w;
}

struct Ascent {
    double value = -std::numeric_limits<double>::infinity();
    Matrix x;
};

// Alternating maximization of the Lagrangian in W and X for fixed L.
Ascent alternate(Matrix x, const Matrix& l, const Matrix& u, const HyperParams& params, const Solvers& solvers) {
    DynamicsConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_sweeps = 2000;
    Ascent best;
    for (int round = 0; round < 50; ++round) {
        const Matrix w = optimal_w(x, u, params, solvers);
        for (Eigen::Index t = 0; t < u.cols(); ++t) {
            const Vector drive = w * u.col(t);
            const auto rec = solvers.rectified(drive, l, params.eps_l, cfg, nullptr);
            if (activity_objective(rec.x, drive, l) > activity_objective(x.col(t), drive, l)) x.col(t) = rec.x;
        }
        const double value = lagrangian(optimal_w(x, u, params, solvers), l, x, u, params);
        const bool stalled = value <= best.value + 1e-13 * (1.0 + std::abs(value));
        if (value > best.value) {
            best.value = value;
            best.x = x;
        }
        if (stalled) break;
    }
    return best;
}

}  // namespace

DualitySearch duality_search(const DualityInstance& inst, std::size_t n_outputs, std::uint64_t seed,
                             const Solvers& solvers) {
    const HyperParams& params = inst.params;
    const Matrix& u = inst.u;
    const auto n_out = static_cast<Eigen::Index>(n_outputs);
    const Matrix d = build_constraint_matrix(params, n_outputs);
    Rng rng(seed);

    auto random_x = [&] {
        Matrix x(n_out, u.cols());
        for (auto& v : x.reshaped()) v = uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(rng, 0.0, 1.0);
        return x;
    };

    DualitySearch out;
    // Primal: hill climbing on the boundary of the feasible set, plus X = 0.
    out.primal_x = Matrix::Zero(n_out, u.cols());
    out.best_primal = primal_value(out.primal_x, u, params, solvers);
    for (int restart = 0; restart < 24; ++restart) {
        Matrix x = scale_to_boundary(random_x(), d);
        double value = primal_value(x, u, params, solvers);
        double step = 0.5;
        for (int it = 0; it < 1500; ++it) {
            Matrix trial = x;
            const auto i = static_cast<Eigen::Index>(uniform_int(rng, 0, static_cast<std::size_t>(n_out - 1)));
            const auto t = static_cast<Eigen::Index>(uniform_int(rng, 0, static_cast<std::size_t>(u.cols() - 1)));
            trial(i, t) = std::max(0.0, trial(i, t) + step * uniform(rng, -1.0, 1.0) * (1.0 + trial(i, t)));
            trial = scale_to_boundary(trial, d);
            const double tv = primal_value(trial, u, params, solvers);
            if (tv > value) {
                value = tv;
                x = trial;
            } else if (it % 100 == 99) {
                step *= 0.7;
            }
        }
        if (value > out.best_primal) {
            out.best_primal = value;
            out.primal_x = x;
        }
    }

    // Dual: projected subgradient on L >= 0 with a floored diagonal.
    Matrix l = Matrix::Identity(n_out, n_out);
    Matrix warm = out.primal_x;
    out.best_dual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 150; ++it) {
        Ascent best = alternate(out.primal_x, l, u, params, solvers);
        for (const Matrix& start : {warm, random_x(), random_x()}) {
            Ascent a = alternate(start, l, u, params, solvers);
            if (a.value > best.value) best = std::move(a);
        }
        if (best.value < out.best_dual) {
            out.best_dual = best.value;
            out.dual_l = l;
        }
        warm = best.x;
        const Matrix m = (best.x * best.x.transpose()) / static_cast<double>(u.cols());
        const double eta = 2.0 / std::sqrt(static_cast<double>(it) + 1.0);
        l += 0.5 * eta * (m - d);
        l = l.cwiseMax(0.0);
        for (Eigen::Index i = 0; i < n_out; ++i) l(i, i) = std::max(l(i, i), params.eps_l);
        l = 0.5 * (l + l.transpose()).eval();
    }
    return out;
}

SuiteResult duality_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers, DualityStats* stats) {
    SuiteResult r{"duality-gap", 0, 0, "-(best dual - best primal)", -std::numeric_limits<double>::infinity(),
                  1e-9, {}};
    Rng rng(suite_seed(seed, 7));
    DualityStats local;
    for (std::size_t inst = 0; inst < sizes.duality_instances; ++inst) {
        const std::size_t n_out = uniform_int(rng, 1, 3);
        const auto n_in = static_cast<Eigen::Index>(uniform_int(rng, 1, 4));
        const auto t = static_cast<Eigen::Index>(uniform_int(rng, 1, 6));
        DualityInstance di;
        di.u.resize(n_in, t);
        for (auto& v : di.u.reshaped()) v = uniform(rng, 0.0, 1.0);
        di.params.variant = Variant::RectifiedAnalog;
        di.params.gamma = uniform(rng, 0.1, 1.0);
        di.params.kappa = uniform(rng, 0.5, 2.0);
        di.params.rho = 1.0;
        di.params.q = 0.5;
        di.params.p = 0.2;
        ++r.instances;
        guarded(r, inst, [&] {
            const auto res = duality_search(di, n_out, rng(), solvers);
            const double gap = res.best_dual - res.best_primal;
            local.gaps.push_back(gap);
            track(r, -gap);
            if (!(gap >= -1e-9)) {
                std::ostringstream os;
                os << "instance " << inst << ": dual " << res.best_dual << " < primal " << res.best_primal;
                fail(r, os.str());
            }
        });
    }
    if (!local.gaps.empty()) {
        local.min_gap = *std::min_element(local.gaps.begin(), local.gaps.end());
        local.max_gap = *std::max_element(local.gaps.begin(), local.gaps.end());
        local.median_gap = median(local.gaps);
    }
    if (stats) *stats = local;
    return r;
}

bool Report::passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

Report run_all(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers) {
    Report rep;
    rep.suites.push_back(kkt_suite(seed, sizes, solvers));
    rep.suites.push_back(topk_suite(seed, sizes, solvers));
    rep.suites.push_back(trigger_suite(seed, sizes, solvers));
    rep.suites.push_back(frobenius_suite(seed, sizes, solvers));
    rep.suites.push_back(gradient_suite(seed, sizes, solvers));
    rep.suites.push_back(dynamics_suite(seed, sizes, solvers));
    rep.suites.push_back(duality_suite(seed, sizes, solvers, &rep.duality));
    return rep;
}

void print_report(std::ostream& os, const Report& report) {
    const auto flags = os.flags();
    os << std::scientific << std::setprecision(3);
    for (const auto& s : report.suites) {
        os << (s.passed() ? "PASS " : "FAIL ") << std::left << std::setw(28) << s.name << std::right
           << " instances=" << s.instances << " failures=" << s.failures << " worst=" << s.worst << " ["
           << s.metric << "]\n";
        if (!s.passed()) os << "     first failure: " << s.first_failure << "\n";
    }
    if (!report.duality.gaps.empty())
        os << "duality gap (dual - primal): min=" << report.duality.min_gap
           << " median=" << report.duality.median_gap << " max=" << report.duality.max_gap << "\n";
    os << (report.passed() ? "verify: all suites passed" : "verify: FAILED") << "\n";
    os.flags(flags);
}

}  // namespace cgame::verify
