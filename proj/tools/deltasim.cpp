// deltasim: batch driver for delta-spike scattering experiments.
//
//   deltasim run --config cfg.json [--threads N] [--quiet]
//   deltasim reproduce <claim-id>|all [--out DIR] [--quiet]
//
// Exit codes: 0 success, 2 validation/usage, 3 numerical failure, 4 I/O.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsim/driver.hpp"
#include "dsim/errors.hpp"
#include "dsim/kernels.hpp"
#include "dsim/version.hpp"

namespace {

unsigned effective_threads(unsigned cli_value) {
    // DSIM_THREADS wins over --threads; 0 means auto
    if (const char* env = std::getenv("DSIM_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0') return static_cast<unsigned>(v);
    }
    return cli_value;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deltasim: delta-spike scattering workbench"};
    app.set_version_flag("--version", std::string("deltasim ") + dsim::kVersion);

    bool quiet = false;
    unsigned threads = 0;
    app.add_flag("--quiet", quiet, "suppress progress output");
    app.add_option("--threads", threads, "worker threads for sweeps (0 = auto)");

    std::string config_path;
    auto* run = app.add_subcommand("run", "execute a run configuration");
    run->add_option("--config", config_path, "JSON run configuration")->required();

    std::vector<std::string> claims;
    std::string out_dir = "reproduce_out";
    auto* rep = app.add_subcommand("reproduce", "re-run a canned claim check");
    rep->add_option("claim", claims, "claim id (or 'all')")->required();
    rep->add_option("--out", out_dir, "output directory for claim tables");

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            const dsim::RunConfig cfg = dsim::load_config(config_path);
            dsim::run_to_file(cfg, effective_threads(threads));
            if (!quiet)
                std::cout << "wrote " << cfg.output_path << " ("
                          << dsim::experiment_name(cfg.experiment) << ", kernel backend "
                          << dsim::kernels::backend_name(dsim::kernels::active_backend()) << ")\n";
            return 0;
        }

        // reproduce
        std::vector<std::string> ids;
        for (const auto& c : claims) {
            if (c == "all") {
                ids = dsim::claim_ids();
                break;
            }
            ids.push_back(c);
        }
        std::filesystem::create_directories(out_dir);
        bool all_pass = true;
        for (const auto& id : ids) {
            const dsim::ClaimOutcome outcome = dsim::reproduce_claim(id);
            const std::string path = out_dir + "/" + id + ".csv";
            dsim::write_csv(path, outcome.table);
            if (!quiet) {
                std::cout << "claim " << id << ": " << (outcome.pass ? "PASS" : "FAIL") << "\n";
                for (const auto& line : outcome.lines) std::cout << line << "\n";
            } else {
                std::cout << "claim " << id << ": " << (outcome.pass ? "PASS" : "FAIL") << "\n";
            }
            all_pass = all_pass && outcome.pass;
        }
        return all_pass ? 0 : 3;
    } catch (const dsim::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const dsim::DomainError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const dsim::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const dsim::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        // file-system and stream failures land here
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
