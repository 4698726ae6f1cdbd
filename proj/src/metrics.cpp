#include "cgame/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cgame/kernels.hpp"

namespace cgame {

double activity_density(const Vector& x, double zero_tol) {
    if (x.size() == 0) return 0.0;
    return static_cast<double>((x.array() > zero_tol).count()) / static_cast<double>(x.size());
}

std::vector<double> SimilarityMatrix::off_diagonal() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (auto v = at(i, j)) out.push_back(*v);
    return out;
}

SimilarityMatrix pairwise_cosine(const Matrix& x, Exec exec) {
    if (x.cols() == 0) throw Error(ErrorCode::InvalidArgument, "similarity window must have at least one step");
    const Matrix m = kernels::second_moments(exec, x, x);
    const auto n = static_cast<std::size_t>(x.rows());
    SimilarityMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            const double denom = std::sqrt(m(ii, ii)) * std::sqrt(m(jj, jj));
            if (denom > 0.0)
                s.set(i, j, std::clamp(m(ii, jj) / denom, -1.0, 1.0));
            else
                s.set(i, j, std::nullopt);
        }
    }
    return s;
}

std::vector<SurvivalCounts> weight_survival(const Matrix& w, double omega, double survival_tol) {
    std::vector<SurvivalCounts> out(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        auto& row = out[static_cast<std::size_t>(i)];
        for (Eigen::Index a = 0; a < w.cols(); ++a) {
            const double v = w(i, a);
            if (v > survival_tol) ++row.surviving;
            if (std::abs(v - omega) <= survival_tol) ++row.saturated;
        }
    }
    return out;
}

std::vector<std::size_t> count_above(const Matrix& w, double threshold) {
    std::vector<std::size_t> out(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        out[static_cast<std::size_t>(i)] = static_cast<std::size_t>((w.row(i).array() > threshold).count());
    return out;
}

std::vector<InhibitionPoint> inhibition_vs_weight_similarity(const NetworkState& state) {
    const Matrix& w = state.w;
    std::vector<double> norms(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) norms[static_cast<std::size_t>(i)] = w.row(i).norm();

    std::vector<InhibitionPoint> out;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < w.rows(); ++j) {
            const double ni = norms[static_cast<std::size_t>(i)];
            const double nj = norms[static_cast<std::size_t>(j)];
            if (ni == 0.0 || nj == 0.0) continue;
            InhibitionPoint pt;
            pt.i = static_cast<std::size_t>(i);
            pt.j = static_cast<std::size_t>(j);
            pt.weight_cosine = std::clamp(w.row(i).dot(w.row(j)) / (ni * nj), -1.0, 1.0);
            pt.lateral = state.l(i, j);
            out.push_back(pt);
        }
    }
    return out;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "histogram needs bins > 0 and hi > lo");
    std::vector<HistogramBin> out(bins);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lo = lo + width * static_cast<double>(b);
        out[b].hi = (b + 1 == bins) ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double v : values) {
        auto b = static_cast<long long>(std::floor((v - lo) / width));
        b = std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1);
        ++out[static_cast<std::size_t>(b)].count;
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) return std::nan("");
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t r = 0;
    while (r < idx.size()) {
        std::size_t s = r;
        while (s + 1 < idx.size() && v[idx[s + 1]] == v[idx[r]]) ++s;
        const double avg = 0.5 * static_cast<double>(r + s) + 1.0;
        for (std::size_t k = r; k <= s; ++k) ranks[idx[k]] = avg;
        r = s + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "spearman: series lengths differ");
    if (a.size() < 2) return 0.0;
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k) {
        cov += (ra[k] - ma) * (rb[k] - mb);
        va += (ra[k] - ma) * (ra[k] - ma);
        vb += (rb[k] - mb) * (rb[k] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

std::optional<DensityPoint> DensityWindow::add(std::uint64_t step, double density) {
    sum_ += density;
    if (++filled_ < window_) return std::nullopt;
    DensityPoint pt{step, sum_ / static_cast<double>(window_)};
    filled_ = 0;
    sum_ = 0.0;
    return pt;
}

}  // namespace cgame
