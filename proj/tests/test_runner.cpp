#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cgame/config.hpp"
#include "cgame/runner.hpp"

using namespace cgame;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "cgame_test_runner" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

RunConfig small_synthetic(const fs::path& out) {
    RunConfig cfg;
    cfg.dataset.kind = DatasetKind::Synthetic;
    cfg.dataset.n_inputs = 16;
    cfg.dataset.n_steps = 500;
    cfg.dataset.n_clusters = 4;
    cfg.dataset.tile_rows = 4;
    cfg.dataset.tile_cols = 4;
    cfg.n_outputs = 6;
    cfg.n_steps = 300;
    cfg.density_window = 50;
    cfg.similarity_window = 100;
    cfg.params.omega = 0.25;
    cfg.out_dir = out;
    return cfg;
}

}  // namespace

TEST_CASE("initial state") {
    HyperParams p;
    std::mt19937_64 rng(1);
    const auto s = initial_state(4, 50, p, rng);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(s.w.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.w.minCoeff() >= 0.0);
    CHECK(s.l == Matrix::Identity(4, 4));
    CHECK(s.theta.isZero(0.0));

    std::mt19937_64 rng2(1);
    const auto tight = initial_state(2, 5, p, rng2);
    CHECK(tight.w.maxCoeff() <= p.omega);
}

TEST_CASE("stimulus order") {
    CHECK(stimulus_order(4, false, 1) == std::vector<std::size_t>{0, 1, 2, 3});
    auto a = stimulus_order(100, true, 5);
    CHECK(a == stimulus_order(100, true, 5));
    CHECK(a != stimulus_order(100, true, 6));
    std::sort(a.begin(), a.end());
    CHECK(a == stimulus_order(100, false, 0));
}

TEST_CASE("one-step smoke run writes every artifact with its schema") {
    auto cfg = small_synthetic(scratch("smoke"));
    cfg.n_steps = 1;
    const auto s = train(cfg);
    CHECK(s.steps == 1);
    CHECK(first_line(cfg.out_dir / "density.csv") == "step,density");
    CHECK(first_line(cfg.out_dir / "similarity_histogram.csv") == "bin_lo,bin_hi,count");
    CHECK(first_line(cfg.out_dir / "weight_survival.csv") == "neuron,surviving,saturated");
    CHECK(first_line(cfg.out_dir / "inhibition_vs_similarity.csv") == "i,j,weight_cosine,lateral");
    CHECK(first_line(cfg.out_dir / "summary.csv") == "key,value");
    CHECK(fs::exists(cfg.out_dir / "final.ckpt"));
    CHECK(slurp(cfg.out_dir / "weights.pgm").rfind("P5\n", 0) == 0);
}

TEST_CASE("identical seed and config reproduce checkpoints bit for bit") {
    auto a = small_synthetic(scratch("det_a"));
    auto b = small_synthetic(scratch("det_b"));
    a.checkpoint_interval = b.checkpoint_interval = 100;
    train(a);
    train(b);
    for (const char* f : {"checkpoint_100.ckpt", "checkpoint_300.ckpt", "final.ckpt", "density.csv", "summary.csv"})
        CHECK(slurp(a.out_dir / f) == slurp(b.out_dir / f));

    auto c = small_synthetic(scratch("det_c"));
    c.seed = 2;
    train(c);
    CHECK(slurp(a.out_dir / "final.ckpt") != slurp(c.out_dir / "final.ckpt"));
}

TEST_CASE("resuming from a checkpoint continues the same trajectory") {
    auto full = small_synthetic(scratch("resume_full"));
    full.checkpoint_interval = 100;
    train(full);

    auto rest = small_synthetic(scratch("resume_rest"));
    rest.n_steps = 200;
    const auto ckpt = checkpoint_load(full.out_dir / "checkpoint_100.ckpt");
    const auto s = train(rest, {}, &ckpt);
    CHECK(s.steps == 300);
    CHECK(slurp(rest.out_dir / "final.ckpt") == slurp(full.out_dir / "final.ckpt"));

    auto wrong = small_synthetic(scratch("resume_wrong"));
    wrong.n_outputs = 5;
    CHECK_THROWS_AS(train(wrong, {}, &ckpt), Error);
}

TEST_CASE("parallel kernels give the same training trajectory") {
    auto a = small_synthetic(scratch("exec_a"));
    auto b = small_synthetic(scratch("exec_b"));
    b.exec = Exec::Parallel;
    train(a);
    train(b);
    CHECK(slurp(a.out_dir / "final.ckpt") == slurp(b.out_dir / "final.ckpt"));
}

TEST_CASE("shuffled order is logged") {
    auto cfg = small_synthetic(scratch("shuffle"));
    cfg.dataset.shuffle = true;
    train(cfg);
    CHECK(first_line(cfg.out_dir / "stimulus_order.csv") == "position,column");
}

TEST_CASE("trainer invariants hold at every step") {
    auto cfg = small_synthetic(scratch("inv"));
    const auto loaded = load_dataset(cfg);
    Trainer t(cfg, loaded.data);
    t.run(cfg.n_steps, [&](const Trainer& tr) { REQUIRE_NOTHROW(tr.state().validate(cfg.params)); });
    CHECK(t.state().step == cfg.n_steps);
    CHECK(t.trailing_activity().cols() == 100);
    CHECK(t.density_series().size() == 6);
}

TEST_CASE("trailing activity is ordered oldest first") {
    auto cfg = small_synthetic(scratch("ring"));
    cfg.similarity_window = 7;
    const auto loaded = load_dataset(cfg);
    Trainer t(cfg, loaded.data);
    std::vector<Vector> seen;
    t.run(20, [&](const Trainer& tr) { seen.push_back(tr.last_activity().x); });
    const Matrix tail = t.trailing_activity();
    REQUIRE(tail.cols() == 7);
    for (Eigen::Index k = 0; k < 7; ++k) CHECK(tail.col(k) == seen[static_cast<std::size_t>(13 + k)]);
}

TEST_CASE("evaluation") {
    auto cfg = small_synthetic(scratch("eval"));
    cfg.n_steps = 500;
    cfg.density_window = 100;
    cfg.similarity_window = 500;
    const auto trained = train(cfg);
    const auto ckpt = checkpoint_load(cfg.out_dir / "final.ckpt");
    const auto data = load_dataset(cfg).data;

    SUBCASE("frozen weights reproduce the trailing training density") {
        const auto ev = evaluate(ckpt, data, cfg);
        CHECK(std::abs(ev.final_density - trained.final_density) <= 0.05);
    }
    SUBCASE("zero inputs give zero density") {
        const auto ev = evaluate(ckpt, Dataset(Matrix::Zero(16, 40)), cfg);
        CHECK(ev.final_density == 0.0);
        for (const auto& p : ev.metrics.density_series) CHECK(p.density == 0.0);
    }
    SUBCASE("repeat evaluations write identical files") {
        const auto d1 = scratch("eval1"), d2 = scratch("eval2");
        write_metrics(d1, evaluate(ckpt, data, cfg), {});
        write_metrics(d2, evaluate(ckpt, data, cfg), {});
        for (const char* f : {"density.csv", "summary.csv", "similarity_histogram.csv", "weight_survival.csv",
                              "inhibition_vs_similarity.csv"})
            CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    SUBCASE("input size mismatch") {
        CHECK_THROWS_AS(evaluate(ckpt, Dataset(Matrix::Zero(5, 3)), cfg), Error);
    }
}

TEST_CASE("config parsing") {
    const std::string text =
        "# comment\n"
        "dataset.kind = mnist\n"
        "dataset.path = ../data/x.idx   # trailing comment\n"
        "params.variant = analog\n"
        "params.gamma = 0.5\n"
        "run.steps = 123\n"
        "dynamics.order = random\n"
        "metrics.survival_tol = 1e-9\n";
    const auto cfg = parse_config(text, "/base/configs");
    CHECK(cfg.dataset.kind == DatasetKind::Mnist);
    CHECK(cfg.dataset.path == fs::path("/base/configs/../data/x.idx"));
    CHECK(cfg.params.variant == Variant::RectifiedAnalog);
    CHECK(cfg.params.gamma == 0.5);
    CHECK(cfg.n_steps == 123);
    CHECK(cfg.dynamics.order == SweepOrder::RandomPermutation);
    CHECK(cfg.survival_threshold() == 1e-9);

    const auto again = parse_config(to_config_text(cfg));
    CHECK(to_config_text(again) == to_config_text(cfg));

    CHECK_THROWS_AS(parse_config("params.bogus = 1\n"), Error);
    CHECK_THROWS_AS(parse_config("run.steps = ten\n"), Error);
    CHECK_THROWS_AS(parse_config("no equals sign\n"), Error);
    CHECK_THROWS_AS(load_config("/nonexistent.cfg"), Error);
}

TEST_CASE("shipped presets parse and validate") {
    const fs::path dir = CGAME_CONFIG_DIR;
    for (const char* name : {"fig2_p001", "fig2_p003", "fig2_p005", "fig3_rho_omega10", "fig3_rho_omega20",
                             "fig5_gamma01", "fig5_gamma05"}) {
        CAPTURE(name);
        const auto cfg = load_config(dir / (std::string(name) + ".cfg"));
        CHECK_NOTHROW(cfg.validate());
        CHECK(fs::exists(cfg.dataset.path));
        CHECK(cfg.params.q == 0.09);
        CHECK(cfg.n_steps == 60000);
    }
    CHECK(load_config(dir / "fig3_rho_omega20.cfg").params.omega == 0.05);
    CHECK(load_config(dir / "fig5_gamma05.cfg").params.variant == Variant::RectifiedAnalog);
}

TEST_CASE("vector files") {
    const auto dir = scratch("vec");
    {
        std::ofstream(dir / "c.txt") << "3, 2\n1\n";
        std::ofstream(dir / "bad.txt") << "1 two 3\n";
    }
    const Vector v = read_vector_file(dir / "c.txt");
    REQUIRE(v.size() == 3);
    CHECK(v(0) == 3.0);
    CHECK(v(2) == 1.0);
    CHECK_THROWS_AS(read_vector_file(dir / "bad.txt"), Error);
    CHECK_THROWS_AS(read_vector_file(dir / "missing.txt"), Error);
}
