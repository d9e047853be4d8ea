#include <algorithm>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bn6/config.hpp"
#include "bn6/errors.hpp"
#include "bn6/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bn6: sign-changing blow-up solutions near lambda0 on the unit 6-ball"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bn6::RunOptions opt;

    std::vector<std::string> commands = bn6::stage_names();
    commands.push_back("all");
    app.add_option("command", command, "constants | lambda0 | ground-state | expansion | branch | report | all")
        ->required()
        ->check(CLI::IsMember(commands));
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--jobs,-j", jobs, "worker threads for the expansion sweep and the branch pair")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--out", out_dir, "output directory (overrides BN6_OUTPUT_DIR and the config file)");
    app.add_flag("--fresh", opt.fresh, "recompute lambda0 and the ground state even if cached");
    app.add_flag("--quiet,-q", opt.quiet, "only errors on stderr");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and friends exit 0; usage errors share the config-error code
        return app.exit(e) == 0 ? 0 : static_cast<int>(bn6::ExitCode::criterion_failure);
    }

    bn6::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = bn6::load_config(config_path);
        bn6::apply_environment(cfg);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
    } catch (const bn6::Error& e) {
        std::fprintf(stderr, "bn6: %s\n", e.what());
        return static_cast<int>(e.exit_code());
    }
    opt.jobs = jobs;
    return bn6::run_command(command, cfg, opt);
}
