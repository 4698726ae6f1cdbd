#include "cgame/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace cgame::oracles {

EnumeratedTopK enumerate_topk(const Vector& c, std::size_t k, double omega) {
    const auto n = static_cast<std::size_t>(c.size());
    if (k == 0 || k > n) throw Error(ErrorCode::InvalidArgument, "enumerate_topk: need 1 <= k <= n");

    std::vector<Eigen::Index> subset(k);
    for (std::size_t r = 0; r < k; ++r) subset[r] = static_cast<Eigen::Index>(r);

    EnumeratedTopK best;
    bool have = false;
    while (true) {
        double value = 0.0;
        for (auto a : subset) value += omega * c(a);
        if (!have || value > best.value + 1e-12 * (1.0 + std::abs(best.value))) {
            best.support = subset;
            best.value = value;
            have = true;
        }
        // Advance to the next combination in lexicographic order.
        std::size_t r = k;
        while (r > 0 && subset[r - 1] == static_cast<Eigen::Index>(n - k + r - 1)) --r;
        if (r == 0) break;
        ++subset[r - 1];
        for (std::size_t s = r; s < k; ++s) subset[s] = subset[s - 1] + 1;
    }
    return best;
}

IterativeSolution analog_conjugate_projected_gradient(const Vector& c, double gamma, double kappa, double rho,
                                                      double tol, std::size_t max_iterations) {
    const Eigen::Index n = c.size();
    const double lipschitz = gamma + kappa * static_cast<double>(n);
    const double step = 1.0 / lipschitz;

    auto ascent_direction = [&](const Vector& w) -> Vector {
        return c - gamma * w - Vector::Constant(n, kappa * (w.sum() - rho));
    };
    auto project = [](const Vector& v) -> Vector { return v.cwiseMax(0.0); };

    IterativeSolution out;
    Vector w = Vector::Zero(n);
    Vector y = w;
    double t = 1.0;
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        const Vector next = project(y + step * ascent_direction(y));
        // Restart momentum when it points against the latest step.
        if ((y - next).dot(next - w) > 0.0) {
            t = 1.0;
            y = next;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = next + ((t - 1.0) / t_next) * (next - w);
            t = t_next;
        }
        w = next;
        out.iterations = it;
        if (it % 16 == 0 || it == max_iterations) {
            const Vector mapped = project(w + step * ascent_direction(w));
            out.gradient_mapping_norm = lipschitz * (mapped - w).norm();
            if (out.gradient_mapping_norm <= tol * gamma) {
                out.converged = true;
                w = mapped;
                break;
            }
        }
    }
    out.w = w;
    return out;
}

Matrix central_difference(const std::function<double(const Matrix&)>& f, const Matrix& w, double h) {
    Matrix g(w.rows(), w.cols());
    Matrix probe = w;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index a = 0; a < w.cols(); ++a) {
            const double saved = probe(i, a);
            probe(i, a) = saved + h;
            const double up = f(probe);
            probe(i, a) = saved - h;
            const double down = f(probe);
            probe(i, a) = saved;
            g(i, a) = (up - down) / (2.0 * h);
        }
    }
    return g;
}

}  // namespace cgame::oracles
