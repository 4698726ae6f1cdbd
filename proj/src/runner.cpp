#include "cgame/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "cgame/kernels.hpp"

namespace cgame {

LoadedDataset load_dataset(const RunConfig& cfg) {
    LoadedDataset out;
    if (cfg.dataset.kind == DatasetKind::Mnist) {
        out.data = load_idx_images(cfg.dataset.path, &out.shape);
    } else {
        out.data = synthetic_correlated(cfg.dataset.n_inputs, cfg.dataset.n_steps, cfg.dataset.n_clusters, cfg.seed,
                                        cfg.dataset.noise);
    }
    if (cfg.dataset.tile_rows && cfg.dataset.tile_cols) out.shape = {cfg.dataset.tile_rows, cfg.dataset.tile_cols};
    return out;
}

NetworkState initial_state(std::size_t n_outputs, std::size_t n_inputs, const HyperParams& params,
                           std::mt19937_64& rng) {
    NetworkState s(n_outputs, n_inputs);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (Eigen::Index i = 0; i < s.w.rows(); ++i) {
        for (Eigen::Index a = 0; a < s.w.cols(); ++a) s.w(i, a) = uniform(rng);
        const double sum = s.w.row(i).sum();
        if (sum > 0.0) s.w.row(i) *= params.rho / sum;
    }
    if (params.variant != Variant::RectifiedAnalog) s.w = s.w.cwiseMin(params.omega);
    return s;
}

std::vector<std::size_t> stimulus_order(std::size_t n, bool shuffle, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle) {
        std::mt19937_64 rng(seed ^ 0x5eed0f5717a1ull);
        std::shuffle(order.begin(), order.end(), rng);
    }
    return order;
}

Trainer::Trainer(const RunConfig& cfg, const Dataset& data)
    : cfg_(cfg), data_(data), density_window_(cfg.density_window) {
    cfg_.validate();
    std::mt19937_64 rng(cfg_.seed);
    state_ = initial_state(cfg_.n_outputs, data_.n_inputs(), cfg_.params, rng);
    order_ = stimulus_order(data_.n_steps(), cfg_.dataset.shuffle, cfg_.seed);
    ring_ = Matrix::Zero(static_cast<Eigen::Index>(cfg_.n_outputs), static_cast<Eigen::Index>(cfg_.similarity_window));
}

Trainer::Trainer(const RunConfig& cfg, const Dataset& data, const NetworkState& resume_from) : Trainer(cfg, data) {
    if (resume_from.n_outputs() != cfg_.n_outputs || resume_from.n_inputs() != data_.n_inputs())
        throw Error(ErrorCode::DimensionMismatch, "checkpoint shape does not match the config and dataset");
    resume_from.validate(cfg_.params);
    state_ = resume_from;
}

void Trainer::step() {
    const std::size_t t = order_[state_.step % order_.size()];
    const Vector u = data_.values.col(static_cast<Eigen::Index>(t));
    const bool sigmoid = cfg_.params.variant == Variant::Sigmoid;
    last_ = sigmoid ? solve_sigmoid(u, state_, cfg_.dynamics)
                    : solve_rectified(u, state_, cfg_.params.eps_l, cfg_.dynamics);
    if (!last_.converged) ++nonconverged_;

    const double density = activity_density(last_.x, sigmoid ? 0.5 : 0.0);
    ring_.col(static_cast<Eigen::Index>(state_.step % cfg_.similarity_window)) = last_.x;
    ++ring_filled_;

    last_update_ = apply_plasticity(state_, last_.x, u, cfg_.params, cfg_.exec);
    if (auto pt = density_window_.add(state_.step, density)) density_series_.push_back(*pt);
}

void Trainer::run(std::uint64_t n_steps, const std::function<void(const Trainer&)>& after_step) {
    for (std::uint64_t s = 0; s < n_steps; ++s) {
        step();
        if (after_step) after_step(*this);
    }
}

Matrix Trainer::trailing_activity() const {
    const auto w = static_cast<std::uint64_t>(cfg_.similarity_window);
    if (ring_filled_ < w) return ring_.leftCols(static_cast<Eigen::Index>(ring_filled_));
    Matrix out(ring_.rows(), ring_.cols());
    const auto start = static_cast<Eigen::Index>(state_.step % w);
    const Eigen::Index tail = ring_.cols() - start;
    out.leftCols(tail) = ring_.rightCols(tail);
    out.rightCols(start) = ring_.leftCols(start);
    return out;
}

Checkpoint Trainer::checkpoint() const {
    Checkpoint c;
    c.params = cfg_.params;
    c.state = state_;
    c.seed = cfg_.seed;
    return c;
}

MetricsLog compute_metrics(const NetworkState& state, const Matrix& activity, const RunConfig& cfg) {
    MetricsLog log;
    if (activity.cols() > 0) {
        const auto sim = pairwise_cosine(activity, cfg.exec);
        log.similarity_values = sim.off_diagonal();
    }
    log.similarity_histogram = histogram(log.similarity_values, cfg.histogram_bins);
    log.weight_survival = weight_survival(state.w, cfg.params.omega, cfg.survival_threshold());
    log.inhibition_vs_similarity = inhibition_vs_weight_similarity(state);
    return log;
}

namespace {

double lateral_spearman(const std::vector<InhibitionPoint>& pts) {
    std::vector<double> a, b;
    for (const auto& p : pts) {
        a.push_back(p.weight_cosine);
        b.push_back(p.lateral);
    }
    return spearman(a, b);
}

double tail_mean(const std::vector<double>& v, std::size_t window) {
    if (v.empty()) return 0.0;
    const std::size_t n = std::min(window, v.size());
    return std::accumulate(v.end() - static_cast<std::ptrdiff_t>(n), v.end(), 0.0) / static_cast<double>(n);
}

void write_grid_if_possible(const NetworkState& state, const ImageShape& shape, const std::filesystem::path& path) {
    if (shape.rows == 0 || shape.rows * shape.cols != state.n_inputs()) return;
    write_weight_grid(state.w, square_grid(state.n_outputs(), shape.rows, shape.cols), path);
}

}  // namespace

void write_metrics(const std::filesystem::path& dir, const RunSummary& s,
                   const std::vector<std::pair<std::string, std::string>>& extra) {
    std::filesystem::create_directories(dir);
    {
        CsvWriter csv(dir / "density.csv", {"step", "density"});
        for (const auto& p : s.metrics.density_series) {
            csv << p.step << p.density;
            csv.end_row();
        }
    }
    {
        CsvWriter csv(dir / "similarity_histogram.csv", {"bin_lo", "bin_hi", "count"});
        for (const auto& b : s.metrics.similarity_histogram) {
            csv << b.lo << b.hi << b.count;
            csv.end_row();
        }
    }
    {
        CsvWriter csv(dir / "weight_survival.csv", {"neuron", "surviving", "saturated"});
        for (std::size_t i = 0; i < s.metrics.weight_survival.size(); ++i) {
            csv << i << s.metrics.weight_survival[i].surviving << s.metrics.weight_survival[i].saturated;
            csv.end_row();
        }
    }
    {
        CsvWriter csv(dir / "inhibition_vs_similarity.csv", {"i", "j", "weight_cosine", "lateral"});
        for (const auto& p : s.metrics.inhibition_vs_similarity) {
            csv << p.i << p.j << p.weight_cosine << p.lateral;
            csv.end_row();
        }
    }
    CsvWriter csv(dir / "summary.csv", {"key", "value"});
    auto row = [&](const std::string& k, const std::string& v) {
        csv << k << v;
        csv.end_row();
    };
    row("steps", std::to_string(s.steps));
    row("final_density", format_double(s.final_density));
    row("median_cosine", format_double(s.median_cosine));
    row("nonconvergence_count", std::to_string(s.nonconverged));
    row("weight_lateral_spearman", format_double(s.weight_lateral_spearman));
    for (const auto& [k, v] : extra) row(k, v);
}

RunSummary train(const RunConfig& cfg, const std::function<void(const Trainer&)>& after_step,
                 const Checkpoint* resume) {
    cfg.validate();
    const LoadedDataset loaded = load_dataset(cfg);
    Trainer trainer = resume ? Trainer(cfg, loaded.data, resume->state) : Trainer(cfg, loaded.data);
    std::filesystem::create_directories(cfg.out_dir);

    if (cfg.dataset.shuffle) {
        CsvWriter csv(cfg.out_dir / "stimulus_order.csv", {"position", "column"});
        for (std::size_t k = 0; k < trainer.order().size(); ++k) {
            csv << k << trainer.order()[k];
            csv.end_row();
        }
    }

    std::vector<double> densities;
    densities.reserve(static_cast<std::size_t>(cfg.n_steps));
    const bool sigmoid = cfg.params.variant == Variant::Sigmoid;
    trainer.run(cfg.n_steps, [&](const Trainer& t) {
        densities.push_back(activity_density(t.last_activity().x, sigmoid ? 0.5 : 0.0));
        if (cfg.checkpoint_interval && t.state().step % cfg.checkpoint_interval == 0) {
            std::ostringstream name;
            name << "checkpoint_" << t.state().step << ".ckpt";
            checkpoint_save(cfg.out_dir / name.str(), t.checkpoint());
        }
        if (after_step) after_step(t);
    });
    checkpoint_save(cfg.out_dir / "final.ckpt", trainer.checkpoint());

    RunSummary s;
    s.steps = trainer.state().step;
    s.state = trainer.state();
    s.metrics = compute_metrics(trainer.state(), trainer.trailing_activity(), cfg);
    s.metrics.density_series = trainer.density_series();
    s.metrics.nonconvergence_count = trainer.nonconvergence_count();
    s.nonconverged = trainer.nonconvergence_count();
    s.final_density = tail_mean(densities, cfg.density_window);
    s.median_cosine = median(s.metrics.similarity_values);
    s.weight_lateral_spearman = lateral_spearman(s.metrics.inhibition_vs_similarity);

    write_grid_if_possible(trainer.state(), loaded.shape, cfg.out_dir / "weights.pgm");
    write_metrics(cfg.out_dir, s,
                  {{"mode", resume ? "resume" : "train"},
                   {"seed", std::to_string(cfg.seed)},
                   {"variant", to_string(cfg.params.variant)},
                   {"shuffled", cfg.dataset.shuffle ? "true" : "false"}});
    return s;
}

RunSummary evaluate(const Checkpoint& ckpt, const Dataset& data, const RunConfig& cfg, std::uint64_t n_steps) {
    if (data.n_inputs() != ckpt.state.n_inputs())
        throw Error(ErrorCode::DimensionMismatch, "dataset inputs do not match the checkpoint");
    const std::uint64_t n = (n_steps == 0) ? data.n_steps() : std::min<std::uint64_t>(n_steps, data.n_steps());
    const Matrix u = data.values.leftCols(static_cast<Eigen::Index>(n));
    const bool sigmoid = ckpt.params.variant == Variant::Sigmoid;

    std::vector<ActivityRecord> records;
    if (sigmoid) {
        for (Eigen::Index t = 0; t < u.cols(); ++t) records.push_back(solve_sigmoid(u.col(t), ckpt.state, cfg.dynamics));
    } else {
        records = kernels::solve_columns(cfg.exec, u, ckpt.state, ckpt.params.eps_l, cfg.dynamics);
    }

    RunSummary s;
    s.steps = n;
    s.state = ckpt.state;
    std::vector<double> densities;
    DensityWindow window(cfg.density_window);
    Matrix activity(static_cast<Eigen::Index>(ckpt.state.n_outputs()), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < records.size(); ++t) {
        const auto& rec = records[t];
        if (!rec.converged) ++s.nonconverged;
        densities.push_back(activity_density(rec.x, sigmoid ? 0.5 : 0.0));
        activity.col(static_cast<Eigen::Index>(t)) = rec.x;
        if (auto pt = window.add(t + 1, densities.back())) s.metrics.density_series.push_back(*pt);
    }
    const auto tail = static_cast<Eigen::Index>(std::min<std::uint64_t>(cfg.similarity_window, n));
    RunConfig metric_cfg = cfg;
    metric_cfg.params = ckpt.params;
    auto log = compute_metrics(ckpt.state, activity.rightCols(tail), metric_cfg);
    log.density_series = std::move(s.metrics.density_series);
    log.nonconvergence_count = s.nonconverged;
    s.metrics = std::move(log);
    s.final_density = tail_mean(densities, cfg.density_window);
    s.median_cosine = median(s.metrics.similarity_values);
    s.weight_lateral_spearman = lateral_spearman(s.metrics.inhibition_vs_similarity);
    return s;
}

Vector read_vector_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream tokens(text);
    std::vector<double> values;
    std::string tok;
    while (tokens >> tok) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            values.push_back(v);
        } catch (const std::exception&) {
            throw Error(ErrorCode::Io, "malformed number '" + tok + "' in " + path.string());
        }
    }
    if (values.empty()) throw Error(ErrorCode::Io, "no numbers in " + path.string());
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace cgame
