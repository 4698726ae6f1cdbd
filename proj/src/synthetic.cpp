#include "cgame/io.hpp"

#include <cmath>
#include <random>

namespace cgame {

std::size_t synthetic_cluster_of(std::size_t channel, std::size_t n_inputs, std::size_t n_clusters) {
    return channel * n_clusters / n_inputs;
}

Dataset synthetic_correlated(std::size_t n_inputs, std::size_t n_steps, std::size_t n_clusters,
                             std::uint64_t seed, double noise_amplitude) {
    if (n_inputs == 0 || n_steps == 0 || n_clusters == 0)
        throw Error(ErrorCode::InvalidArgument, "synthetic dataset sizes must be positive");
    if (n_clusters > n_inputs) throw Error(ErrorCode::InvalidArgument, "more clusters than input channels");
    if (!(noise_amplitude >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise amplitude must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(static_cast<Eigen::Index>(n_inputs), static_cast<Eigen::Index>(n_steps));
    std::vector<double> latent(n_clusters);
    for (std::size_t t = 0; t < n_steps; ++t) {
        for (auto& s : latent) s = std::abs(normal(rng));
        for (std::size_t a = 0; a < n_inputs; ++a) {
            const double noise = noise_amplitude * std::abs(normal(rng));
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) =
                latent[synthetic_cluster_of(a, n_inputs, n_clusters)] + noise;
        }
    }
    return Dataset(std::move(m));
}

}  // namespace cgame
