#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cgame/core.hpp"

namespace cgame {

// ---- IDX (MNIST distribution format) -------------------------------------

inline constexpr std::uint32_t kIdxLabelMagic = 2049;
inline constexpr std::uint32_t kIdxImageMagic = 2051;

struct IdxHeader {
    std::uint32_t magic = 0;
    std::vector<std::uint32_t> dims;

    std::size_t header_bytes() const { return 4 + 4 * dims.size(); }
    std::uint64_t element_count() const;
};

/// Parses the big-endian header at the start of bytes. Validates the magic
/// against `expected_magic` and that the payload length matches the dims.
IdxHeader parse_idx_header(const std::vector<std::uint8_t>& bytes, std::uint32_t expected_magic);

/// Reads a whole file; gzip-compressed files are inflated transparently.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

struct ImageShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

/// Images as columns of a Dataset, pixels scaled by 1/255, file order kept.
Dataset load_idx_images(const std::filesystem::path& path, ImageShape* shape = nullptr);
Dataset parse_idx_images(const std::vector<std::uint8_t>& bytes, ImageShape* shape = nullptr);

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path);

/// Writes an uncompressed IDX image file; values are mapped by round(255 v), clipped to [0,255].
void write_idx_images(const std::filesystem::path& path, const Dataset& data, ImageShape shape);

// ---- synthetic inputs ----------------------------------------------------

/// Input channels partitioned into contiguous clusters: channel a belongs to
/// cluster floor(a * n_clusters / n_inputs). At each step every cluster draws
/// a latent |N(0,1)| value shared by its channels, and every channel adds its
/// own noise_amplitude * |N(0,1)|. Draw order: latents for all clusters, then
/// noise for all channels, step by step, from std::mt19937_64(seed).
Dataset synthetic_correlated(std::size_t n_inputs, std::size_t n_steps, std::size_t n_clusters,
                             std::uint64_t seed, double noise_amplitude = 0.1);

std::size_t synthetic_cluster_of(std::size_t channel, std::size_t n_inputs, std::size_t n_clusters);

// ---- weight images -------------------------------------------------------

struct GridLayout {
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
    std::size_t tile_rows = 28;
    std::size_t tile_cols = 28;

    std::size_t width() const { return grid_cols * tile_cols + (grid_cols ? grid_cols - 1 : 0); }
    std::size_t height() const { return grid_rows * tile_rows + (grid_rows ? grid_rows - 1 : 0); }
};

/// Smallest near-square grid holding n tiles.
GridLayout square_grid(std::size_t n, std::size_t tile_rows, std::size_t tile_cols);

/// Renders each row of W as a tile, scaled so its largest entry maps to 255.
/// Tiles are separated by one-pixel lines of value 128. Unused cells are black.
std::vector<std::uint8_t> render_weight_grid(const Matrix& w, const GridLayout& layout);

/// Binary PGM ("P5", maxval 255) of render_weight_grid.
void write_weight_grid(const Matrix& w, const GridLayout& layout, const std::filesystem::path& path);

// ---- checkpoints ---------------------------------------------------------

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    HyperParams params;
    NetworkState state;
    std::uint64_t seed = 0;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void checkpoint_save(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint checkpoint_load(const std::filesystem::path& path);

// ---- CSV -----------------------------------------------------------------

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(const std::string& v);
    template <std::integral T>
    CsvWriter& operator<<(T v) {
        separator();
        out_ << v;
        return *this;
    }
    void end_row();

private:
    void separator();

    std::ofstream out_;
    bool row_started_ = false;
};

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace cgame
