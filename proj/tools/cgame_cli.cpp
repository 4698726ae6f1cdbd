#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cgame/config.hpp"
#include "cgame/runner.hpp"
#include "cgame/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string checkpoint;
    std::optional<std::uint64_t> steps;
};

cgame::RunConfig resolve_config(const Common& o) {
    cgame::RunConfig cfg = o.config.empty() ? cgame::RunConfig{} : cgame::load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (o.steps) cfg.n_steps = *o.steps;
    return cfg;
}

nlohmann::json vector_json(const cgame::Vector& v) { return std::vector<double>(v.begin(), v.end()); }

void print_summary(const cgame::RunSummary& s) {
    std::cout << "steps " << s.steps << "\nfinal_density " << s.final_density << "\nmedian_cosine "
              << s.median_cosine << "\nnonconverged " << s.nonconverged << "\nweight_lateral_spearman "
              << s.weight_lateral_spearman << "\n";
}

int cmd_train(const Common& o) {
    const auto cfg = resolve_config(o);
    std::optional<cgame::Checkpoint> resume;
    if (!o.checkpoint.empty()) resume = cgame::checkpoint_load(o.checkpoint);
    const auto summary = cgame::train(cfg, {}, resume ? &*resume : nullptr);
    print_summary(summary);
    std::cout << "artifacts in " << cfg.out_dir.string() << "\n";
    return kOk;
}

int cmd_eval(const Common& o) {
    if (o.checkpoint.empty()) throw CLI::RequiredError("--checkpoint");
    auto cfg = resolve_config(o);
    const auto ckpt = cgame::checkpoint_load(o.checkpoint);
    const auto loaded = cgame::load_dataset(cfg);
    const auto summary = cgame::evaluate(ckpt, loaded.data, cfg, o.steps.value_or(0));
    cgame::write_metrics(cfg.out_dir, summary, {{"mode", "eval"}, {"checkpoint", o.checkpoint}});
    print_summary(summary);
    return kOk;
}

struct SolveOptions {
    std::string c_path;
    std::string form = "topk";
    double rho = 1.0;
    double omega = 0.1;
    double gamma = 0.1;
    double kappa = 1.0;
};

int cmd_solve(const Common& o, const SolveOptions& s) {
    const cgame::Vector c = cgame::read_vector_file(s.c_path);
    cgame::ConjugateSolution sol;
    if (s.form == "topk")
        sol = cgame::conjugate_topk(c, s.rho, s.omega);
    else
        sol = cgame::conjugate_analog_kkt(c, s.gamma, s.kappa, s.rho);

    nlohmann::json j;
    j["form"] = s.form;
    j["w"] = vector_json(sol.w);
    j["k"] = sol.k;
    j["value"] = sol.value;
    j["theta"] = sol.theta ? nlohmann::json(*sol.theta) : nlohmann::json(nullptr);
    std::cout << j.dump(2) << "\n";
    if (!o.out.empty()) {
        std::filesystem::create_directories(o.out);
        std::ofstream f(std::filesystem::path(o.out) / "solution.json");
        if (!f) throw cgame::Error(cgame::ErrorCode::Io, "cannot write solution.json in " + o.out);
        f << j.dump(2) << "\n";
    }
    return kOk;
}

int cmd_verify(const Common& o, bool quick, const std::string& fault) {
    cgame::verify::Sizes sizes;
    if (quick) {
        sizes.kkt_instances = 100;
        sizes.topk_vectors = 50;
        sizes.trigger_instances = 100;
        sizes.frobenius_instances = 100;
        sizes.gradient_draws = 10;
        sizes.dynamics_instances = 50;
        sizes.duality_instances = 3;
    }
    cgame::verify::Solvers solvers;
    if (fault == "kkt") {
        solvers.analog = [](const cgame::Vector& c, double g, double k, double r) {
            auto sol = cgame::conjugate_analog_kkt(c, g, k, r);
            sol.w *= 1.001;
            return sol;
        };
    } else if (fault == "topk") {
        solvers.topk = [](const cgame::Vector& c, double r, double w) {
            auto sol = cgame::conjugate_topk(-c, r, w);
            return sol;
        };
    } else if (!fault.empty()) {
        throw CLI::ValidationError("--fault", "unknown fault '" + fault + "'");
    }
    const auto report = cgame::verify::run_all(o.seed.value_or(1), sizes, solvers);
    cgame::verify::print_report(std::cout, report);
    return report.exit_code() == 0 ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlation-game network trainer and solver"};
    app.require_subcommand(1);

    Common o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Config file (key = value lines)")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Seed, overrides run.seed");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--checkpoint", o.checkpoint, "Checkpoint file");
        sub->add_option("--steps", o.steps, "Number of steps (train) or stimuli (eval)");
    };

    auto* train = app.add_subcommand("train", "Train a network and write metrics, checkpoints and weight images");
    add_common(train);
    auto* eval = app.add_subcommand("eval", "Frozen-weight metrics for a checkpoint");
    add_common(eval);

    SolveOptions solve_opts;
    auto* solve = app.add_subcommand("solve", "Solve the row conjugate for a correlation vector");
    add_common(solve);
    solve->add_option("--c", solve_opts.c_path, "File with the correlation vector")->required()->check(CLI::ExistingFile);
    solve->add_option("--form", solve_opts.form, "topk or analog")->check(CLI::IsMember({"topk", "analog"}));
    solve->add_option("--rho", solve_opts.rho, "Row-sum target");
    solve->add_option("--omega", solve_opts.omega, "Synapse bound (topk)");
    solve->add_option("--gamma", solve_opts.gamma, "Weight decay (analog)");
    solve->add_option("--kappa", solve_opts.kappa, "Competition stiffness (analog)");

    bool quick = false;
    std::string fault;
    auto* verify = app.add_subcommand("verify", "Run the solver property suites");
    add_common(verify);
    verify->add_flag("--quick", quick, "Reduced instance counts");
    verify->add_option("--fault", fault, "Inject a broken solver (kkt|topk); test fixture");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*train) return cmd_train(o);
        if (*eval) return cmd_eval(o);
        if (*solve) return cmd_solve(o, solve_opts);
        if (*verify) return cmd_verify(o, quick, fault);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const cgame::Error& e) {
        std::cerr << "error [" << cgame::to_string(e.code()) << "]: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
