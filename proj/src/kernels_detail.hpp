#pragma once

#include <algorithm>
#include <cmath>

#include "cgame/kernels.hpp"

namespace cgame::kernels::detail {

struct RowTally {
    std::size_t low = 0;
    std::size_t high = 0;
    double max_delta = 0.0;
};

inline RowTally update_row(double* row, Eigen::Index n, double xi, const double* u, const FeedforwardRule& r) {
    double sum = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) sum += row[a];
    const double competition = r.kappa * (sum - r.rho);
    RowTally tally;
    for (Eigen::Index a = 0; a < n; ++a) {
        const double old = row[a];
        double v = old + r.eta * (xi * u[a] - r.decay * old - competition);
        if (v < 0.0) {
            v = 0.0;
            ++tally.low;
        } else if (r.clamp_upper && v > r.upper) {
            v = r.upper;
            ++tally.high;
        }
        tally.max_delta = std::max(tally.max_delta, std::abs(v - old));
        row[a] = v;
    }
    return tally;
}

inline double moment(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index t = 0; t < a.cols(); ++t) s += a(i, t) * b(j, t);
    return s / static_cast<double>(a.cols());
}

inline void check_moment_shapes(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols() || a.cols() == 0)
        throw Error(ErrorCode::DimensionMismatch, "second moments need matching nonzero column counts");
}

}  // namespace cgame::kernels::detail
