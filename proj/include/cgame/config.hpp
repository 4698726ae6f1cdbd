#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "cgame/core.hpp"
#include "cgame/dynamics.hpp"
#include "cgame/plasticity.hpp"

namespace cgame {

enum class DatasetKind { Mnist, Synthetic };

struct DatasetSpec {
    DatasetKind kind = DatasetKind::Synthetic;
    std::filesystem::path path;      // IDX image file (mnist)
    bool shuffle = false;            // permute stimulus order from the run seed
    std::size_t n_inputs = 64;       // synthetic
    std::size_t n_steps = 10000;     // synthetic
    std::size_t n_clusters = 8;      // synthetic
    double noise = 0.1;              // synthetic
    std::size_t tile_rows = 0;       // weight-grid tile shape; 0 = derive from data
    std::size_t tile_cols = 0;
};

struct RunConfig {
    DatasetSpec dataset;
    HyperParams params;
    DynamicsConfig dynamics;
    std::size_t n_outputs = 64;
    std::uint64_t n_steps = 60000;
    std::uint64_t seed = 1;
    std::size_t density_window = 100;
    std::size_t similarity_window = 10000;
    std::size_t histogram_bins = 50;
    std::optional<double> survival_tol;  // defaults to 1e-6 * omega
    std::filesystem::path out_dir = "out";
    std::uint64_t checkpoint_interval = 0;  // 0: final checkpoint only
    Exec exec = Exec::Serial;

    double survival_threshold() const { return survival_tol.value_or(1e-6 * params.omega); }
    void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Relative dataset paths
/// resolve against base_dir. Unknown keys are errors.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Applies one `key = value` assignment to cfg.
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir = {});

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& cfg);

}  // namespace cgame
