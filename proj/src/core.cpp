#include "cgame/core.hpp"

#include <cmath>
#include <sstream>

namespace cgame {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NonPositiveDiagonal: return "NonPositiveDiagonal";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::NonIntegralRatio: return "NonIntegralRatio";
    case ErrorCode::Internal: return "Internal";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptPayload: return "CorruptPayload";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

const char* to_string(Variant v) {
    switch (v) {
    case Variant::RectifiedBounded: return "rectified-bounded";
    case Variant::RectifiedAnalog: return "rectified-analog";
    case Variant::Sigmoid: return "sigmoid";
    }
    return "unknown";
}

Variant parse_variant(const std::string& name) {
    if (name == "rectified-bounded" || name == "bounded") return Variant::RectifiedBounded;
    if (name == "rectified-analog" || name == "analog") return Variant::RectifiedAnalog;
    if (name == "sigmoid") return Variant::Sigmoid;
    throw Error(ErrorCode::InvalidArgument, "unknown variant '" + name + "'");
}

Dataset::Dataset(Matrix m) : values(std::move(m)) { validate(); }

void Dataset::validate() const {
    if (values.rows() == 0 || values.cols() == 0)
        throw Error(ErrorCode::InvariantViolation, "dataset must have at least one input and one step");
    for (Eigen::Index a = 0; a < values.rows(); ++a) {
        for (Eigen::Index t = 0; t < values.cols(); ++t) {
            const double v = values(a, t);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                std::ostringstream os;
                os << "dataset entry (" << a << "," << t << ") = " << v << " is not a finite nonnegative value";
                throw Error(ErrorCode::InvariantViolation, os.str());
            }
        }
    }
}

void HyperParams::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
    if (!(p >= 0.0)) fail("p must be >= 0");
    if (!(q > 0.0)) fail("q must be > 0");
    if (p > q) fail("p must not exceed q");
    if (!(kappa >= 0.0)) fail("kappa must be >= 0");
    if (!(rho > 0.0)) fail("rho must be > 0");
    if (!(omega > 0.0)) fail("omega must be > 0");
    if (!(gamma >= 0.0)) fail("gamma must be >= 0");
    if (!(eta_w > 0.0) || !(eta_l > 0.0)) fail("learning rates must be > 0");
    if (eta_theta && !(*eta_theta > 0.0)) fail("eta_theta must be > 0");
    if (!(eps_l > 0.0)) fail("eps_l must be > 0");
}

NetworkState::NetworkState(std::size_t n_outputs, std::size_t n_inputs)
    : w(Matrix::Zero(static_cast<Eigen::Index>(n_outputs), static_cast<Eigen::Index>(n_inputs))),
      l(Matrix::Identity(static_cast<Eigen::Index>(n_outputs), static_cast<Eigen::Index>(n_outputs))),
      theta(Vector::Zero(static_cast<Eigen::Index>(n_outputs))) {}

bool is_exactly_symmetric(const Matrix& m) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (m(i, j) != m(j, i)) return false;
    return true;
}

void NetworkState::validate(const HyperParams& params) const {
    auto fail = [](const std::string& what, Eigen::Index i, Eigen::Index j, double v) {
        std::ostringstream os;
        os << what << " at (" << i << "," << j << ") value " << v;
        throw Error(ErrorCode::InvariantViolation, os.str());
    };
    const Eigen::Index n = w.rows();
    if (l.rows() != n || l.cols() != n)
        throw Error(ErrorCode::InvariantViolation, "L must be n_outputs x n_outputs");
    if (theta.size() != n)
        throw Error(ErrorCode::InvariantViolation, "theta must have n_outputs entries");
    const bool bounded = params.variant != Variant::RectifiedAnalog;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index a = 0; a < w.cols(); ++a) {
            const double v = w(i, a);
            if (!std::isfinite(v) || v < 0.0) fail("W entry negative or non-finite", i, a, v);
            if (bounded && v > params.omega) fail("W entry above omega", i, a, v);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = l(i, j);
            if (!std::isfinite(v) || v < 0.0) fail("L entry negative or non-finite", i, j, v);
            if (l(i, j) != l(j, i)) fail("L not exactly symmetric", i, j, v);
        }
        if (params.variant != Variant::Sigmoid && l(i, i) < params.eps_l)
            fail("L diagonal below floor", i, i, l(i, i));
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (!std::isfinite(theta(i))) fail("theta non-finite", i, i, theta(i));
}

Matrix build_constraint_matrix(const HyperParams& params, std::size_t n_outputs) {
    if (n_outputs == 0) throw Error(ErrorCode::InvalidArgument, "n_outputs must be >= 1");
    const auto n = static_cast<Eigen::Index>(n_outputs);
    Matrix d = Matrix::Constant(n, n, params.p * params.p);
    d.diagonal().setConstant(params.q * params.q);
    return d;
}

CorrelationPair correlations(const Matrix& x, const Dataset& u) {
    if (x.cols() != u.values.cols()) {
        std::ostringstream os;
        os << "X has " << x.cols() << " steps but U has " << u.values.cols();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    const double inv_t = 1.0 / static_cast<double>(x.cols());
    CorrelationPair out;
    out.output_input = (x * u.values.transpose()) * inv_t;
    out.output_output = (x * x.transpose()) * inv_t;
    // Force exact symmetry; the product is symmetric only up to summation order.
    for (Eigen::Index i = 0; i < out.output_output.rows(); ++i)
        for (Eigen::Index j = i + 1; j < out.output_output.cols(); ++j)
            out.output_output(j, i) = out.output_output(i, j);
    return out;
}

}  // namespace cgame
