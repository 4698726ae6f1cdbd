#include "cgame/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <sstream>

namespace cgame {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'C', 'G', 'C', 'K'};
// magic, version, variant, flags, n_out, n_in, step, seed, 10 hyperparameters
constexpr std::size_t kFixedHeader = 4 + 4 + 4 + 4 + 8 * 4 + 8 * 10;
constexpr std::uint32_t kFlagEtaTheta = 1u;

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

class Writer {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void raw(const std::uint8_t* p, std::size_t n) { bytes.insert(bytes.end(), p, p + n); }
    std::vector<std::uint8_t> bytes;

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::size_t offset() const { return off_; }

private:
    std::uint64_t get(int n) {
        if (off_ + static_cast<std::size_t>(n) > b_.size())
            throw Error(ErrorCode::CorruptPayload, "checkpoint truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t{b_[off_ + static_cast<std::size_t>(i)]} << (8 * i);
        off_ += static_cast<std::size_t>(n);
        return v;
    }
    const std::vector<std::uint8_t>& b_;
    std::size_t off_ = 0;
};

std::uint32_t variant_code(Variant v) {
    switch (v) {
    case Variant::RectifiedBounded: return 0;
    case Variant::RectifiedAnalog: return 1;
    case Variant::Sigmoid: return 2;
    }
    return 0;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
    const auto& s = ckpt.state;
    const auto& p = ckpt.params;
    Writer w;
    w.raw(kMagic.data(), kMagic.size());
    w.u32(kCheckpointVersion);
    w.u32(variant_code(p.variant));
    w.u32(p.eta_theta ? kFlagEtaTheta : 0u);
    w.u64(s.n_outputs());
    w.u64(s.n_inputs());
    w.u64(s.step);
    w.u64(ckpt.seed);
    for (double v : {p.p, p.q, p.kappa, p.rho, p.omega, p.gamma, p.eta_w, p.eta_l, p.eta_theta.value_or(0.0), p.eps_l})
        w.f64(v);
    for (Eigen::Index i = 0; i < s.w.rows(); ++i)
        for (Eigen::Index a = 0; a < s.w.cols(); ++a) w.f64(s.w(i, a));
    for (Eigen::Index i = 0; i < s.l.rows(); ++i)
        for (Eigen::Index j = 0; j < s.l.cols(); ++j) w.f64(s.l(i, j));
    for (Eigen::Index i = 0; i < s.theta.size(); ++i) w.f64(s.theta(i));
    w.u64(fnv1a(w.bytes.data(), w.bytes.size()));
    return std::move(w.bytes);
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kFixedHeader + 8) throw Error(ErrorCode::CorruptPayload, "checkpoint shorter than its header");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        throw Error(ErrorCode::CorruptPayload, "not a checkpoint file (bad magic)");
    Reader r(bytes);
    r.u32();
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        std::ostringstream os;
        os << "checkpoint version " << version << ", this build reads version " << kCheckpointVersion;
        throw Error(ErrorCode::VersionMismatch, os.str());
    }
    const std::uint32_t variant = r.u32();
    const std::uint32_t flags = r.u32();
    const std::uint64_t n_out = r.u64();
    const std::uint64_t n_in = r.u64();
    const std::uint64_t step = r.u64();
    const std::uint64_t seed = r.u64();
    if (n_out == 0 || n_in == 0 || n_out > (1u << 20) || n_in > (1u << 24))
        throw Error(ErrorCode::CorruptPayload, "implausible checkpoint dimensions");
    const std::uint64_t doubles = n_out * n_in + n_out * n_out + n_out;
    if (bytes.size() != kFixedHeader + 8 * doubles + 8)
        throw Error(ErrorCode::CorruptPayload, "checkpoint length does not match its declared dimensions");
    const std::uint64_t stored_sum = [&] {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes[bytes.size() - 8 + static_cast<std::size_t>(i)]} << (8 * i);
        return v;
    }();
    if (stored_sum != fnv1a(bytes.data(), bytes.size() - 8))
        throw Error(ErrorCode::CorruptPayload, "checkpoint checksum mismatch");
    if (variant > 2) throw Error(ErrorCode::CorruptPayload, "unknown variant code");

    Checkpoint ck;
    ck.seed = seed;
    auto& p = ck.params;
    p.variant = variant == 0 ? Variant::RectifiedBounded : variant == 1 ? Variant::RectifiedAnalog : Variant::Sigmoid;
    p.p = r.f64();
    p.q = r.f64();
    p.kappa = r.f64();
    p.rho = r.f64();
    p.omega = r.f64();
    p.gamma = r.f64();
    p.eta_w = r.f64();
    p.eta_l = r.f64();
    const double eta_theta = r.f64();
    if (flags & kFlagEtaTheta) p.eta_theta = eta_theta;
    p.eps_l = r.f64();

    ck.state = NetworkState(n_out, n_in);
    ck.state.step = step;
    for (Eigen::Index i = 0; i < ck.state.w.rows(); ++i)
        for (Eigen::Index a = 0; a < ck.state.w.cols(); ++a) ck.state.w(i, a) = r.f64();
    for (Eigen::Index i = 0; i < ck.state.l.rows(); ++i)
        for (Eigen::Index j = 0; j < ck.state.l.cols(); ++j) ck.state.l(i, j) = r.f64();
    for (Eigen::Index i = 0; i < ck.state.theta.size(); ++i) ck.state.theta(i) = r.f64();

    p.validate();
    ck.state.validate(p);
    return ck;
}

void checkpoint_save(const std::filesystem::path& path, const Checkpoint& ckpt) {
    const auto bytes = encode_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Checkpoint checkpoint_load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace cgame
