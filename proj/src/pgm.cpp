#include "cgame/io.hpp"

#include <cmath>

namespace cgame {

GridLayout square_grid(std::size_t n, std::size_t tile_rows, std::size_t tile_cols) {
    GridLayout g;
    g.tile_rows = tile_rows;
    g.tile_cols = tile_cols;
    g.grid_cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    if (g.grid_cols == 0) g.grid_cols = 1;
    g.grid_rows = (n + g.grid_cols - 1) / g.grid_cols;
    if (g.grid_rows == 0) g.grid_rows = 1;
    return g;
}

std::vector<std::uint8_t> render_weight_grid(const Matrix& w, const GridLayout& layout) {
    const auto n = static_cast<std::size_t>(w.rows());
    if (layout.grid_rows * layout.grid_cols < n)
        throw Error(ErrorCode::ShapeMismatch, "grid has fewer cells than output neurons");
    if (layout.tile_rows * layout.tile_cols != static_cast<std::size_t>(w.cols()))
        throw Error(ErrorCode::ShapeMismatch, "tile shape does not match the number of inputs");

    const std::size_t width = layout.width();
    const std::size_t height = layout.height();
    std::vector<std::uint8_t> img(width * height, 128);
    for (std::size_t cell = 0; cell < layout.grid_rows * layout.grid_cols; ++cell) {
        const std::size_t gr = cell / layout.grid_cols;
        const std::size_t gc = cell % layout.grid_cols;
        const std::size_t y0 = gr * (layout.tile_rows + 1);
        const std::size_t x0 = gc * (layout.tile_cols + 1);
        double peak = 0.0;
        if (cell < n) peak = w.row(static_cast<Eigen::Index>(cell)).maxCoeff();
        for (std::size_t r = 0; r < layout.tile_rows; ++r) {
            for (std::size_t c = 0; c < layout.tile_cols; ++c) {
                std::uint8_t px = 0;
                if (cell < n && peak > 0.0) {
                    const double v = w(static_cast<Eigen::Index>(cell), static_cast<Eigen::Index>(r * layout.tile_cols + c));
                    px = static_cast<std::uint8_t>(std::lround(255.0 * std::max(v, 0.0) / peak));
                }
                img[(y0 + r) * width + x0 + c] = px;
            }
        }
    }
    return img;
}

void write_weight_grid(const Matrix& w, const GridLayout& layout, const std::filesystem::path& path) {
    const auto img = render_weight_grid(w, layout);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << "P5\n" << layout.width() << " " << layout.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

}  // namespace cgame
