#include "cgame/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "cgame/io.hpp"

namespace cgame {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw Error(ErrorCode::Config, "invalid value '" + value + "' for key '" + key + "'");
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) bad_value(key, v);
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) bad_value(key, v);
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v);
}

}  // namespace

void RunConfig::validate() const {
    params.validate();
    dynamics.validate();
    if (n_outputs == 0) throw Error(ErrorCode::Config, "run.n_outputs must be >= 1");
    if (n_steps == 0) throw Error(ErrorCode::Config, "run.steps must be >= 1");
    if (density_window == 0 || similarity_window == 0 || histogram_bins == 0)
        throw Error(ErrorCode::Config, "metric windows and bin counts must be >= 1");
    if (dataset.kind == DatasetKind::Mnist && dataset.path.empty())
        throw Error(ErrorCode::Config, "dataset.path is required for mnist datasets");
    if (dataset.kind == DatasetKind::Synthetic &&
        (dataset.n_inputs == 0 || dataset.n_steps == 0 || dataset.n_clusters == 0 ||
         dataset.n_clusters > dataset.n_inputs))
        throw Error(ErrorCode::Config, "synthetic dataset needs 1 <= n_clusters <= n_inputs and n_steps >= 1");
}

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir) {
    using Setter = std::function<void(RunConfig&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"dataset.kind",
         [](RunConfig& c, const std::string& v) {
             if (v == "mnist")
                 c.dataset.kind = DatasetKind::Mnist;
             else if (v == "synthetic")
                 c.dataset.kind = DatasetKind::Synthetic;
             else
                 bad_value("dataset.kind", v);
         }},
        {"dataset.shuffle", [](RunConfig& c, const std::string& v) { c.dataset.shuffle = to_bool("dataset.shuffle", v); }},
        {"dataset.n_inputs", [](RunConfig& c, const std::string& v) { c.dataset.n_inputs = to_uint("dataset.n_inputs", v); }},
        {"dataset.n_steps", [](RunConfig& c, const std::string& v) { c.dataset.n_steps = to_uint("dataset.n_steps", v); }},
        {"dataset.n_clusters", [](RunConfig& c, const std::string& v) { c.dataset.n_clusters = to_uint("dataset.n_clusters", v); }},
        {"dataset.noise", [](RunConfig& c, const std::string& v) { c.dataset.noise = to_double("dataset.noise", v); }},
        {"dataset.tile_rows", [](RunConfig& c, const std::string& v) { c.dataset.tile_rows = to_uint("dataset.tile_rows", v); }},
        {"dataset.tile_cols", [](RunConfig& c, const std::string& v) { c.dataset.tile_cols = to_uint("dataset.tile_cols", v); }},
        {"params.variant", [](RunConfig& c, const std::string& v) { c.params.variant = parse_variant(v); }},
        {"params.p", [](RunConfig& c, const std::string& v) { c.params.p = to_double("params.p", v); }},
        {"params.q", [](RunConfig& c, const std::string& v) { c.params.q = to_double("params.q", v); }},
        {"params.kappa", [](RunConfig& c, const std::string& v) { c.params.kappa = to_double("params.kappa", v); }},
        {"params.rho", [](RunConfig& c, const std::string& v) { c.params.rho = to_double("params.rho", v); }},
        {"params.omega", [](RunConfig& c, const std::string& v) { c.params.omega = to_double("params.omega", v); }},
        {"params.gamma", [](RunConfig& c, const std::string& v) { c.params.gamma = to_double("params.gamma", v); }},
        {"params.eta_w", [](RunConfig& c, const std::string& v) { c.params.eta_w = to_double("params.eta_w", v); }},
        {"params.eta_l", [](RunConfig& c, const std::string& v) { c.params.eta_l = to_double("params.eta_l", v); }},
        {"params.eta_theta", [](RunConfig& c, const std::string& v) { c.params.eta_theta = to_double("params.eta_theta", v); }},
        {"params.eps_l", [](RunConfig& c, const std::string& v) { c.params.eps_l = to_double("params.eps_l", v); }},
        {"dynamics.tol", [](RunConfig& c, const std::string& v) { c.dynamics.tol = to_double("dynamics.tol", v); }},
        {"dynamics.max_sweeps",
         [](RunConfig& c, const std::string& v) { c.dynamics.max_sweeps = static_cast<int>(to_uint("dynamics.max_sweeps", v)); }},
        {"dynamics.order",
         [](RunConfig& c, const std::string& v) {
             if (v == "cyclic")
                 c.dynamics.order = SweepOrder::Cyclic;
             else if (v == "random")
                 c.dynamics.order = SweepOrder::RandomPermutation;
             else
                 bad_value("dynamics.order", v);
         }},
        {"dynamics.seed", [](RunConfig& c, const std::string& v) { c.dynamics.seed = to_uint("dynamics.seed", v); }},
        {"run.n_outputs", [](RunConfig& c, const std::string& v) { c.n_outputs = to_uint("run.n_outputs", v); }},
        {"run.steps", [](RunConfig& c, const std::string& v) { c.n_steps = to_uint("run.steps", v); }},
        {"run.seed", [](RunConfig& c, const std::string& v) { c.seed = to_uint("run.seed", v); }},
        {"run.exec",
         [](RunConfig& c, const std::string& v) {
             if (v == "serial")
                 c.exec = Exec::Serial;
             else if (v == "parallel")
                 c.exec = Exec::Parallel;
             else
                 bad_value("run.exec", v);
         }},
        {"metrics.density_window", [](RunConfig& c, const std::string& v) { c.density_window = to_uint("metrics.density_window", v); }},
        {"metrics.similarity_window",
         [](RunConfig& c, const std::string& v) { c.similarity_window = to_uint("metrics.similarity_window", v); }},
        {"metrics.histogram_bins", [](RunConfig& c, const std::string& v) { c.histogram_bins = to_uint("metrics.histogram_bins", v); }},
        {"metrics.survival_tol", [](RunConfig& c, const std::string& v) { c.survival_tol = to_double("metrics.survival_tol", v); }},
        {"output.dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
        {"output.checkpoint_interval",
         [](RunConfig& c, const std::string& v) { c.checkpoint_interval = to_uint("output.checkpoint_interval", v); }},
    };
    if (key == "dataset.path") {
        std::filesystem::path p(value);
        cfg.dataset.path = (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
        return;
    }
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorCode::Config, "unknown config key '" + key + "'");
    it->second(cfg, value);
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": empty key or value");
        apply_config_key(cfg, key, value, base_dir);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::string to_config_text(const RunConfig& c) {
    std::ostringstream os;
    auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
    auto d = [](double v) { return format_double(v); };
    kv("dataset.kind", c.dataset.kind == DatasetKind::Mnist ? "mnist" : "synthetic");
    if (!c.dataset.path.empty()) kv("dataset.path", c.dataset.path.string());
    kv("dataset.shuffle", c.dataset.shuffle ? "true" : "false");
    kv("dataset.n_inputs", std::to_string(c.dataset.n_inputs));
    kv("dataset.n_steps", std::to_string(c.dataset.n_steps));
    kv("dataset.n_clusters", std::to_string(c.dataset.n_clusters));
    kv("dataset.noise", d(c.dataset.noise));
    kv("dataset.tile_rows", std::to_string(c.dataset.tile_rows));
    kv("dataset.tile_cols", std::to_string(c.dataset.tile_cols));
    kv("params.variant", to_string(c.params.variant));
    kv("params.p", d(c.params.p));
    kv("params.q", d(c.params.q));
    kv("params.kappa", d(c.params.kappa));
    kv("params.rho", d(c.params.rho));
    kv("params.omega", d(c.params.omega));
    kv("params.gamma", d(c.params.gamma));
    kv("params.eta_w", d(c.params.eta_w));
    kv("params.eta_l", d(c.params.eta_l));
    if (c.params.eta_theta) kv("params.eta_theta", d(*c.params.eta_theta));
    kv("params.eps_l", d(c.params.eps_l));
    kv("dynamics.tol", d(c.dynamics.tol));
    kv("dynamics.max_sweeps", std::to_string(c.dynamics.max_sweeps));
    kv("dynamics.order", c.dynamics.order == SweepOrder::Cyclic ? "cyclic" : "random");
    kv("dynamics.seed", std::to_string(c.dynamics.seed));
    kv("run.n_outputs", std::to_string(c.n_outputs));
    kv("run.steps", std::to_string(c.n_steps));
    kv("run.seed", std::to_string(c.seed));
    kv("run.exec", c.exec == Exec::Parallel ? "parallel" : "serial");
    kv("metrics.density_window", std::to_string(c.density_window));
    kv("metrics.similarity_window", std::to_string(c.similarity_window));
    kv("metrics.histogram_bins", std::to_string(c.histogram_bins));
    if (c.survival_tol) kv("metrics.survival_tol", d(*c.survival_tol));
    kv("output.dir", c.out_dir.string());
    kv("output.checkpoint_interval", std::to_string(c.checkpoint_interval));
    return os.str();
}

}  // namespace cgame
