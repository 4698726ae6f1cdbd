#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cgame/core.hpp"
#include "cgame/plasticity.hpp"

namespace cgame {

/// Fraction of outputs with activity strictly above zero_tol.
double activity_density(const Vector& x, double zero_tol = 0.0);

/// Symmetric matrix of pairwise cosine similarities between output time
/// series. Pairs involving a silent output (zero second moment) are absent.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    explicit SimilarityMatrix(std::size_t n) : n_(n), entries_(n * n) {}

    std::size_t size() const { return n_; }
    std::optional<double> at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, std::optional<double> v) {
        entries_[i * n_ + j] = v;
        entries_[j * n_ + i] = v;
    }
    /// Values for all unordered pairs i < j that are present.
    std::vector<double> off_diagonal() const;

private:
    std::size_t n_ = 0;
    std::vector<std::optional<double>> entries_;
};

/// x is n_outputs x window; entry (i,j) = <x_i x_j> / sqrt(<x_i^2><x_j^2>).
SimilarityMatrix pairwise_cosine(const Matrix& x, Exec exec = Exec::Serial);

struct SurvivalCounts {
    std::size_t surviving = 0;  // entries > survival_tol
    std::size_t saturated = 0;  // entries within survival_tol of omega
};

std::vector<SurvivalCounts> weight_survival(const Matrix& w, double omega, double survival_tol);

/// Number of entries above threshold in each row of W.
std::vector<std::size_t> count_above(const Matrix& w, double threshold);

struct InhibitionPoint {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight_cosine = 0.0;
    double lateral = 0.0;
};

/// One point per unordered output pair whose W rows are both nonzero.
std::vector<InhibitionPoint> inhibition_vs_weight_similarity(const NetworkState& state);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

/// Equal-width histogram over [lo, hi]; values outside are clipped into the end bins.
std::vector<HistogramBin> histogram(const std::vector<double>& values, std::size_t bins, double lo = 0.0,
                                    double hi = 1.0);

double median(std::vector<double> values);

/// Spearman rank correlation (average ranks for ties). Returns 0 when either
/// series is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct DensityPoint {
    std::uint64_t step = 0;  // last step of the window (1-based)
    double density = 0.0;
};

struct MetricsLog {
    std::vector<DensityPoint> density_series;
    std::vector<HistogramBin> similarity_histogram;
    std::vector<double> similarity_values;
    std::vector<SurvivalCounts> weight_survival;
    std::vector<InhibitionPoint> inhibition_vs_similarity;
    std::size_t nonconvergence_count = 0;
};

/// Accumulates per-step densities into fixed-size window averages.
class DensityWindow {
public:
    explicit DensityWindow(std::size_t window) : window_(window == 0 ? 1 : window) {}

    // Returns a point when a window completes.
    std::optional<DensityPoint> add(std::uint64_t step, double density);

private:
    std::size_t window_;
    std::size_t filled_ = 0;
    double sum_ = 0.0;
};

}  // namespace cgame
