#include "kernels_detail.hpp"

namespace cgame::kernels::serial {

UpdateReport update_feedforward(Matrix& w, const Vector& x, const Vector& u, const FeedforwardRule& rule) {
    UpdateReport rep;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const auto t = detail::update_row(w.row(i).data(), w.cols(), x(i), u.data(), rule);
        rep.n_clamped_low += t.low;
        rep.n_clamped_high += t.high;
        rep.max_delta_w = std::max(rep.max_delta_w, t.max_delta);
    }
    return rep;
}

std::vector<ActivityRecord> solve_columns(const Matrix& u, const NetworkState& state, double eps_l,
                                          const DynamicsConfig& cfg) {
    std::vector<ActivityRecord> out(static_cast<std::size_t>(u.cols()));
    for (Eigen::Index t = 0; t < u.cols(); ++t)
        out[static_cast<std::size_t>(t)] = solve_rectified(u.col(t), state, eps_l, cfg);
    return out;
}

Matrix second_moments(const Matrix& a, const Matrix& b) {
    detail::check_moment_shapes(a, b);
    Matrix m(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) m(i, j) = detail::moment(a, i, b, j);
    return m;
}

}  // namespace cgame::kernels::serial
