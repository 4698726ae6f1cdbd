#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cgame {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    InvariantViolation,
    NonPositiveDiagonal,
    VariantMismatch,
    NonIntegralRatio,
    Internal,
    BadMagic,
    TruncatedFile,
    DimMismatch,
    ShapeMismatch,
    VersionMismatch,
    CorruptPayload,
    Io,
    Config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class Variant {
    RectifiedBounded,  // W in [0, omega], homeostatic diagonal of L
    RectifiedAnalog,   // W >= 0 with weight decay gamma
    Sigmoid,           // logistic units, homeostatic thresholds
};

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);

/// Nonnegative input matrix: rows are input channels, columns are timesteps.
struct Dataset {
    Matrix values;

    Dataset() = default;
    explicit Dataset(Matrix m);

    std::size_t n_inputs() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_steps() const { return static_cast<std::size_t>(values.cols()); }

    void validate() const;
};

struct HyperParams {
    double p = 0.03;      // sqrt of target off-diagonal correlation
    double q = 0.09;      // sqrt of target diagonal correlation
    double kappa = 1.0;   // competition stiffness
    double rho = 1.0;     // target row sum of W
    double omega = 0.1;   // per-synapse upper bound (bounded variant)
    double gamma = 0.1;   // weight decay (analog variant)
    double eta_w = 0.001;
    double eta_l = 0.1;
    std::optional<double> eta_theta;  // defaults to eta_l
    double eps_l = 1e-3;  // floor on the diagonal of L
    Variant variant = Variant::RectifiedBounded;

    double threshold_rate() const { return eta_theta.value_or(eta_l); }
    void validate() const;
};

struct NetworkState {
    Matrix w;       // n_outputs x n_inputs, feedforward
    Matrix l;       // n_outputs x n_outputs, lateral, symmetric
    Vector theta;   // thresholds, sigmoid variant only
    std::uint64_t step = 0;

    NetworkState() = default;
    NetworkState(std::size_t n_outputs, std::size_t n_inputs);

    std::size_t n_outputs() const { return static_cast<std::size_t>(w.rows()); }
    std::size_t n_inputs() const { return static_cast<std::size_t>(w.cols()); }

    // Throws InvariantViolation naming the first offending entry.
    void validate(const HyperParams& params) const;
};

/// Exact (bitwise) symmetry of a square matrix.
bool is_exactly_symmetric(const Matrix& m);

struct ActivityRecord {
    Vector x;
    int sweeps_used = 0;
    double residual = 0.0;
    bool converged = false;
};

struct CorrelationPair {
    Matrix output_input;   // X U^T / T
    Matrix output_output;  // X X^T / T
};

/// D_ii = q^2, D_ij = p^2 for i != j.
Matrix build_constraint_matrix(const HyperParams& params, std::size_t n_outputs);

/// Second-moment matrices of outputs X (n_out x T) against inputs U (n_in x T).
CorrelationPair correlations(const Matrix& x, const Dataset& u);

}  // namespace cgame
