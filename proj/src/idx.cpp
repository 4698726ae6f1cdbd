#include "cgame/io.hpp"

#include <cmath>
#include <sstream>

#include <zlib.h>

namespace cgame {

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off) {
    return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
           std::uint32_t{b[off + 3]};
}

void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    b.push_back(static_cast<std::uint8_t>(v >> 24));
    b.push_back(static_cast<std::uint8_t>(v >> 16));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
    b.push_back(static_cast<std::uint8_t>(v));
}

[[noreturn]] void fail_at(ErrorCode code, std::size_t offset, const std::string& what) {
    std::ostringstream os;
    os << what << " (byte offset " << offset << ")";
    throw Error(code, os.str());
}

}  // namespace

std::uint64_t IdxHeader::element_count() const {
    unsigned __int128 n = 1;
    for (auto d : dims) {
        n *= d;
        if (n > (unsigned __int128)UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(n);
}

IdxHeader parse_idx_header(const std::vector<std::uint8_t>& bytes, std::uint32_t expected_magic) {
    if (bytes.size() < 4) fail_at(ErrorCode::TruncatedFile, bytes.size(), "file too short for IDX magic");
    IdxHeader h;
    h.magic = read_be32(bytes, 0);
    if (h.magic != expected_magic) {
        std::ostringstream os;
        os << "magic " << h.magic << ", expected " << expected_magic;
        fail_at(ErrorCode::BadMagic, 0, os.str());
    }
    const std::size_t ndims = bytes[3];
    const std::size_t header = 4 + 4 * ndims;
    if (bytes.size() < header) fail_at(ErrorCode::TruncatedFile, bytes.size(), "file ends inside the dimension list");
    for (std::size_t d = 0; d < ndims; ++d) {
        const std::uint32_t v = read_be32(bytes, 4 + 4 * d);
        if (v == 0) fail_at(ErrorCode::DimMismatch, 4 + 4 * d, "zero-sized dimension");
        h.dims.push_back(v);
    }
    const std::uint64_t count = h.element_count();
    const std::uint64_t payload = bytes.size() - header;
    if (payload < count) {
        std::ostringstream os;
        os << "payload of " << payload << " bytes is shorter than the " << count << " declared elements";
        fail_at(ErrorCode::TruncatedFile, bytes.size(), os.str());
    }
    if (payload > count) {
        std::ostringstream os;
        os << (payload - count) << " trailing bytes beyond the declared " << count << " elements";
        fail_at(ErrorCode::DimMismatch, header + count, os.str());
    }
    return h;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> chunk(1 << 16);
    while (true) {
        const int n = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()));
        if (n < 0) {
            gzclose(f);
            throw Error(ErrorCode::Io, "read error in " + path.string());
        }
        if (n == 0) break;
        out.insert(out.end(), chunk.begin(), chunk.begin() + n);
    }
    gzclose(f);
    return out;
}

Dataset parse_idx_images(const std::vector<std::uint8_t>& bytes, ImageShape* shape) {
    const IdxHeader h = parse_idx_header(bytes, kIdxImageMagic);
    if (h.dims.size() != 3) fail_at(ErrorCode::DimMismatch, 3, "image files need 3 dimensions");
    const std::size_t n = h.dims[0];
    const std::size_t rows = h.dims[1];
    const std::size_t cols = h.dims[2];
    const std::size_t pixels = rows * cols;
    Matrix m(static_cast<Eigen::Index>(pixels), static_cast<Eigen::Index>(n));
    const std::uint8_t* src = bytes.data() + h.header_bytes();
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t a = 0; a < pixels; ++a)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = src[t * pixels + a] / 255.0;
    if (shape) *shape = ImageShape{rows, cols};
    return Dataset(std::move(m));
}

Dataset load_idx_images(const std::filesystem::path& path, ImageShape* shape) {
    return parse_idx_images(read_file_bytes(path), shape);
}

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    const IdxHeader h = parse_idx_header(bytes, kIdxLabelMagic);
    return {bytes.begin() + static_cast<std::ptrdiff_t>(h.header_bytes()), bytes.end()};
}

void write_idx_images(const std::filesystem::path& path, const Dataset& data, ImageShape shape) {
    if (shape.rows * shape.cols != data.n_inputs())
        throw Error(ErrorCode::ShapeMismatch, "image shape does not match the number of inputs");
    std::vector<std::uint8_t> bytes;
    put_be32(bytes, kIdxImageMagic);
    put_be32(bytes, static_cast<std::uint32_t>(data.n_steps()));
    put_be32(bytes, static_cast<std::uint32_t>(shape.rows));
    put_be32(bytes, static_cast<std::uint32_t>(shape.cols));
    for (Eigen::Index t = 0; t < data.values.cols(); ++t) {
        for (Eigen::Index a = 0; a < data.values.rows(); ++a) {
            const double v = std::round(255.0 * data.values(a, t));
            bytes.push_back(static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v)));
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace cgame
