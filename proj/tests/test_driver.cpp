#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dsim/driver.hpp"
#include "dsim/errors.hpp"
#include "dsim/kernels.hpp"

using namespace dsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_transmission_config() {
    return json{{"experiment", "transmission"},
                {"scene",
                 {{"positions", {0.0, 1.0}}, {"strengths", {1000.0, 1000.0}}}},
                {"sweep", {{"k_min", 0.01}, {"k_max", 0.5}, {"k_steps", 500}}},
                {"output", {{"path", "out.csv"}}}};
}

std::string render_csv(const Table& t) {
    std::ostringstream os;
    for (const auto& m : t.meta) os << "# " << m << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
    for (const auto& row : t.rows)
        for (std::size_t c = 0; c < row.size(); ++c) os << row[c] << (c + 1 < row.size() ? "," : "\n");
    return os.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), ("missing file: " + path));
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool regen_golden() { return std::getenv("DSIM_REGEN_GOLDEN") != nullptr; }

} // namespace

TEST_CASE("config: strict schema") {
    CHECK_NOTHROW((void)parse_config(base_transmission_config()));

    json bad = base_transmission_config();
    bad["sweep"]["k_stepz"] = 3;  // typo
    CHECK_THROWS_AS((void)parse_config(bad), ValidationError);

    bad = base_transmission_config();
    bad["unknown_top"] = 1;
    CHECK_THROWS_AS((void)parse_config(bad), ValidationError);

    bad = base_transmission_config();
    bad["sweep"].erase("k_min");
    CHECK_THROWS_AS((void)parse_config(bad), ValidationError);

    bad = base_transmission_config();
    bad["sweep"]["k_steps"] = 0;  // empty sweep
    CHECK_THROWS_AS((void)parse_config(bad), ValidationError);

    bad = base_transmission_config();
    bad["scene"]["positions"] = {0.0, 1.0, 0.5};
    CHECK_THROWS_AS((void)parse_config(bad), ValidationError);

    bad = base_transmission_config();
    bad["experiment"] = "nope";
    CHECK_THROWS_AS((void)parse_config(bad), ValidationError);

    bad = base_transmission_config();
    bad.erase("scene");  // transmission needs one
    CHECK_THROWS_AS((void)parse_config(bad), ValidationError);

    bad = base_transmission_config();
    bad["output"]["format"] = "xml";
    CHECK_THROWS_AS((void)parse_config(bad), ValidationError);
}

TEST_CASE("config echo re-parses to an equivalent config") {
    const RunConfig cfg = parse_config(base_transmission_config());
    const RunConfig again = parse_config(cfg.echo);
    CHECK(again.echo == cfg.echo);
    CHECK(again.experiment == cfg.experiment);
    CHECK(again.scene.positions == cfg.scene.positions);
}

TEST_CASE("transmission sweep table and golden file") {
    kernels::BackendGuard guard(kernels::Backend::scalar);
    const RunConfig cfg = parse_config(base_transmission_config());
    const Table t = run_experiment(cfg, 2);
    REQUIRE(t.rows.size() == 500);
    CHECK(t.columns.size() == 6);
    // all rows are clean in this window (no resonances below k = pi)
    for (const auto& row : t.rows) CHECK(row.back() == "ok");

    const std::string rendered = render_csv(t);
    const std::string golden_path = std::string(DSIM_GOLDEN_DIR) + "/transmission_sweep.csv";
    if (regen_golden()) {
        std::ofstream out(golden_path, std::ios::binary);
        out << rendered;
        MESSAGE("regenerated " << golden_path);
    } else {
        CHECK(rendered == slurp(golden_path));
    }
}

TEST_CASE("concurrent sweeps are deterministic") {
    const RunConfig cfg = parse_config(base_transmission_config());
    const Table a = run_experiment(cfg, 1);
    const Table b = run_experiment(cfg, 2);
    const Table c = run_experiment(cfg, 0);
    CHECK(render_csv(a) == render_csv(b));
    CHECK(render_csv(a) == render_csv(c));
}

TEST_CASE("delays sweep: opaque rows satisfy the zero-traversal bar") {
    json j = base_transmission_config();
    j["experiment"] = "delays";
    j["sweep"] = {{"k_min", 0.05}, {"k_max", 0.3}, {"k_steps", 11}};
    const RunConfig cfg = parse_config(j);
    const Table t = run_experiment(cfg, 0);
    REQUIRE(t.rows.size() == 11);
    for (const auto& row : t.rows) {
        REQUIRE(row.back() == "ok");
        const double free_time = std::stod(row[2]);
        const double traversal = std::stod(row[3]);
        CHECK(std::abs(traversal) < 0.02 * free_time);
    }
}

TEST_CASE("resonant delay rows are skipped, not fatal") {
    json j = base_transmission_config();
    j["experiment"] = "delays";
    // grid hits k = pi exactly (positions span 1)
    j["sweep"] = {{"k_min", 3.14159265358979323846 - 0.1},
                  {"k_max", 3.14159265358979323846 + 0.1},
                  {"k_steps", 3}};
    const RunConfig cfg = parse_config(j);
    const Table t = run_experiment(cfg, 1);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[1].back() == "skipped-resonance");
    CHECK(t.rows[0].back() == "ok");
    CHECK(t.rows[2].back() == "ok");
}

TEST_CASE("superosc, fabry, weak, packet, dwell-weak configs execute") {
    {
        json j{{"experiment", "superosc"},
               {"sweep",
                {{"N", 16}, {"L", 5.0}, {"x0", 1.0}, {"k_min", 0.0}, {"k_max", 1.0},
                 {"k_steps", 11}}},
               {"output", {{"path", "so.csv"}}}};
        const Table t = run_experiment(parse_config(j), 0);
        CHECK(t.rows.size() == 11);
    }
    {
        json j{{"experiment", "fabry"},
               {"sweep",
                {{"alpha", 2.0}, {"L", 0.7}, {"terms", 64}, {"k_min", 0.5}, {"k_max", 2.0},
                 {"k_steps", 7}}},
               {"output", {{"path", "fp.csv"}}}};
        const Table t = run_experiment(parse_config(j), 0);
        CHECK(t.rows.size() == 7);
        for (const auto& row : t.rows) CHECK(row.back() == "ok");
    }
    {
        json j{{"experiment", "weak"},
               {"sweep",
                {{"a1", 0.0}, {"a2", 1.0}, {"z_values", {{2.0, 0.0}, {0.5, 0.5}}}}},
               {"output", {{"path", "wk.csv"}}}};
        const Table t = run_experiment(parse_config(j), 0);
        REQUIRE(t.rows.size() == 2);
        CHECK(std::stod(t.rows[0][6]) < 1e-12);
        CHECK(std::stod(t.rows[1][6]) < 1e-12);
    }
    {
        json j{{"experiment", "packet"},
               {"scene", {{"positions", {0.0, 1.0}}, {"strengths", {2.0, 2.0}}}},
               {"sweep",
                {{"k0", 1.0}, {"dk", 0.1}, {"x_min", -10.0}, {"x_max", 10.0}, {"x_points", 21},
                 {"t_min", 0.0}, {"t_max", 4.0}, {"t_points", 3}, {"flatness_band", 0.3}}},
               {"numerics", {{"spectral_points", 513}}},
               {"output", {{"path", "pk.csv"}}}};
        const Table t = run_experiment(parse_config(j), 0);
        CHECK(t.rows.size() == 21 * 3);
        bool has_flatness = false;
        for (const auto& m : t.meta) has_flatness |= (m.rfind("flatness:", 0) == 0);
        CHECK(has_flatness);
    }
    {
        json j{{"experiment", "dwell-weak"},
               {"scene", {{"positions", {0.0, 1.0}}, {"strengths", {0.0, 0.0}}}},
               {"sweep",
                {{"k0", 1.0}, {"dk", 0.1}, {"region", {0.0, 1.0}}, {"region_points", 33},
                 {"t_min", -80.0}, {"t_max", 80.0}, {"t_points", 161},
                 {"denom_x_min", -60.0}, {"denom_x_max", 60.0}, {"denom_x_points", 961},
                 {"t_ref_check", 10.0}}},
               {"numerics", {{"spectral_points", 513}}},
               {"output", {{"path", "dw.csv"}}}};
        const Table t = run_experiment(parse_config(j), 0);
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0].back() == "ok");
        CHECK(std::stod(t.rows[0][0]) == doctest::Approx(1.0).epsilon(0.1));
    }
}

TEST_CASE("csv and json writers") {
    Table t;
    t.meta = {"deltasim test", "experiment: none"};
    t.columns = {"a", "b"};
    t.rows = {{"1", "x"}, {format_double(0.5), "ok"}};
    const fs::path dir = fs::temp_directory_path() / "dsim_writer_test";
    fs::create_directories(dir);
    const std::string csv = (dir / "t.csv").string();
    const std::string jsn = (dir / "t.json").string();
    write_csv(csv, t);
    write_json(jsn, t);
    const std::string body = slurp(csv);
    CHECK(body.rfind("# deltasim test\n", 0) == 0);
    CHECK(body.find("a,b\n") != std::string::npos);
    CHECK(body.find("5.0000000000000000e-01,ok\n") != std::string::npos);
    const json parsed = json::parse(slurp(jsn));
    CHECK(parsed["columns"].size() == 2);
    CHECK(parsed["rows"].size() == 2);
    CHECK_THROWS_AS(write_csv((dir / "no_dir" / "t.csv").string(), t), IoError);
    fs::remove_all(dir);
}

TEST_CASE("reproduce: ids, unknown id, determinism, golden tables") {
    CHECK(claim_ids().size() == 8);
    CHECK_THROWS_AS((void)reproduce_claim("not-a-claim"), ValidationError);

    // cheap claims run twice and must emit identical tables
    for (const std::string id : {"superosc-band", "weak-any-z", "fabry-equivalence"}) {
        const ClaimOutcome a = reproduce_claim(id);
        const ClaimOutcome b = reproduce_claim(id);
        CHECK(a.pass);
        CHECK(render_csv(a.table) == render_csv(b.table));

        const std::string golden_path = std::string(DSIM_GOLDEN_DIR) + "/" + id + ".csv";
        if (regen_golden()) {
            std::ofstream out(golden_path, std::ios::binary);
            out << render_csv(a.table);
        } else {
            CHECK(render_csv(a.table) == slurp(golden_path));
        }
    }
}

TEST_CASE("cli binary: version, run, reproduce, exit codes") {
    const std::string cli = DSIM_CLI_PATH;
    if (!fs::exists(cli)) {
        MESSAGE("cli binary not built yet; skipping");
        return;
    }
    const fs::path dir = fs::temp_directory_path() / "dsim_cli_test";
    fs::create_directories(dir);

    auto shell = [&](const std::string& cmd) { return std::system(cmd.c_str()); };

    CHECK(shell(cli + " --version > " + (dir / "v.txt").string()) == 0);
    CHECK(slurp((dir / "v.txt").string()).rfind("deltasim", 0) == 0);

    // same config run twice (second time with 2 workers): byte-identical
    json j = base_transmission_config();
    j["sweep"]["k_steps"] = 40;
    j["output"]["path"] = (dir / "sweep.csv").string();
    std::ofstream((dir / "cfg1.json").string()) << j.dump();
    CHECK(shell(cli + " --quiet run --config " + (dir / "cfg1.json").string()) == 0);
    const std::string first = slurp((dir / "sweep.csv").string());
    CHECK(shell(cli + " --quiet --threads 2 run --config " + (dir / "cfg1.json").string()) == 0);
    CHECK(first == slurp((dir / "sweep.csv").string()));

    // validation failures exit with 2
    json bad = base_transmission_config();
    bad["sweep"]["k_steps"] = 0;
    bad["output"]["path"] = (dir / "x.csv").string();
    std::ofstream((dir / "bad.json").string()) << bad.dump();
    CHECK(WEXITSTATUS(shell(cli + " --quiet run --config " + (dir / "bad.json").string())) == 2);
    CHECK(WEXITSTATUS(shell(cli + " --quiet run --config " + (dir / "missing.json").string())) ==
          4);
    CHECK(WEXITSTATUS(shell(cli + " reproduce nope --out " + (dir / "r").string())) == 2);

    // one cheap claim through the binary
    CHECK(shell(cli + " --quiet reproduce superosc-band --out " + (dir / "rep").string()) == 0);
    CHECK(fs::exists(dir / "rep" / "superosc-band.csv"));
    fs::remove_all(dir);
}
