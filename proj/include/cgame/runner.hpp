#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cgame/config.hpp"
#include "cgame/io.hpp"
#include "cgame/metrics.hpp"
#include "cgame/objective.hpp"

namespace cgame {

struct LoadedDataset {
    Dataset data;
    ImageShape shape;  // tile shape for weight images; zero when unknown
};

LoadedDataset load_dataset(const RunConfig& cfg);

/// W uniform on [0,1] then each row scaled to sum rho (and clamped to omega
/// for bounded variants); L = identity; theta = 0.
NetworkState initial_state(std::size_t n_outputs, std::size_t n_inputs, const HyperParams& params,
                           std::mt19937_64& rng);

/// Stimulus order for a dataset of n columns: identity, or a seed-derived
/// permutation when shuffling.
std::vector<std::size_t> stimulus_order(std::size_t n, bool shuffle, std::uint64_t seed);

/// Online learner: one stimulus per step, dynamics then plasticity.
class Trainer {
public:
    Trainer(const RunConfig& cfg, const Dataset& data);
    /// Continues from a saved state; its step counter selects the next stimulus.
    Trainer(const RunConfig& cfg, const Dataset& data, const NetworkState& resume_from);

    void step();
    void run(std::uint64_t n_steps, const std::function<void(const Trainer&)>& after_step = {});

    const NetworkState& state() const { return state_; }
    const RunConfig& config() const { return cfg_; }
    const ActivityRecord& last_activity() const { return last_; }
    const UpdateReport& last_update() const { return last_update_; }
    const std::vector<std::size_t>& order() const { return order_; }

    const std::vector<DensityPoint>& density_series() const { return density_series_; }
    std::size_t nonconvergence_count() const { return nonconverged_; }

    /// Outputs over the trailing similarity window, oldest first.
    Matrix trailing_activity() const;

    Checkpoint checkpoint() const;

private:
    RunConfig cfg_;
    const Dataset& data_;
    NetworkState state_;
    std::vector<std::size_t> order_;
    ActivityRecord last_;
    UpdateReport last_update_;
    DensityWindow density_window_;
    std::vector<DensityPoint> density_series_;
    std::size_t nonconverged_ = 0;
    Matrix ring_;
    std::uint64_t ring_filled_ = 0;
};

struct RunSummary {
    std::uint64_t steps = 0;
    double final_density = 0.0;      // last complete density window (or mean density for eval)
    double median_cosine = 0.0;
    std::size_t nonconverged = 0;
    double weight_lateral_spearman = 0.0;
    MetricsLog metrics;
    NetworkState state;
};

/// Frozen-weight metrics over the trailing activity matrix (n_outputs x T).
MetricsLog compute_metrics(const NetworkState& state, const Matrix& activity, const RunConfig& cfg);

/// Writes the metric CSV files into dir. `extra` rows are appended to summary.csv.
void write_metrics(const std::filesystem::path& dir, const RunSummary& summary,
                   const std::vector<std::pair<std::string, std::string>>& extra);

/// Full training run with artifacts written to cfg.out_dir. With `resume`,
/// cfg.n_steps further steps are taken from the checkpointed state.
RunSummary train(const RunConfig& cfg, const std::function<void(const Trainer&)>& after_step = {},
                 const Checkpoint* resume = nullptr);

/// Frozen-weight pass over the first n_steps columns of data (all if 0).
RunSummary evaluate(const Checkpoint& ckpt, const Dataset& data, const RunConfig& cfg, std::uint64_t n_steps = 0);

/// Reads whitespace- or comma-separated numbers.
Vector read_vector_file(const std::filesystem::path& path);

}  // namespace cgame
