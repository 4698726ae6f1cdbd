#include "kernels_detail.hpp"

#include <omp.h>

namespace cgame::kernels {

int max_threads() { return omp_get_max_threads(); }

namespace omp {

UpdateReport update_feedforward(Matrix& w, const Vector& x, const Vector& u, const FeedforwardRule& rule) {
    const Eigen::Index rows = w.rows();
    const Eigen::Index cols = w.cols();
    std::size_t low = 0;
    std::size_t high = 0;
    double max_delta = 0.0;
#pragma omp parallel for reduction(+ : low, high) reduction(max : max_delta) schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto t = detail::update_row(w.row(i).data(), cols, x(i), u.data(), rule);
        low += t.low;
        high += t.high;
        max_delta = std::max(max_delta, t.max_delta);
    }
    UpdateReport rep;
    rep.n_clamped_low = low;
    rep.n_clamped_high = high;
    rep.max_delta_w = max_delta;
    return rep;
}

std::vector<ActivityRecord> solve_columns(const Matrix& u, const NetworkState& state, double eps_l,
                                          const DynamicsConfig& cfg) {
    const Eigen::Index n = u.cols();
    std::vector<ActivityRecord> out(static_cast<std::size_t>(n));
    bool failed = false;
    Error first_error(ErrorCode::Internal, "unset");
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index t = 0; t < n; ++t) {
        try {
            out[static_cast<std::size_t>(t)] = solve_rectified(u.col(t), state, eps_l, cfg);
        } catch (const Error& e) {
#pragma omp critical(cgame_solve_columns_error)
            if (!failed) {
                failed = true;
                first_error = e;
            }
        }
    }
    if (failed) throw first_error;
    return out;
}

Matrix second_moments(const Matrix& a, const Matrix& b) {
    detail::check_moment_shapes(a, b);
    Matrix m(a.rows(), b.rows());
    const Eigen::Index rows = a.rows();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) m(i, j) = detail::moment(a, i, b, j);
    return m;
}

}  // namespace omp
}  // namespace cgame::kernels
