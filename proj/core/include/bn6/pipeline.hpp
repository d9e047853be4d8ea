#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bn6/config.hpp"
#include "bn6/critical.hpp"
#include "bn6/manifest.hpp"
#include "bn6/radial_bvp.hpp"

namespace bn6 {

struct RunOptions {
    unsigned jobs = 1;
    bool fresh = false;  ///< ignore cached lambda0 / ground-state results
    bool quiet = false;
};

/// Stage names in pipeline order, as accepted on the command line.
[[nodiscard]] const std::vector<std::string>& stage_names();

/// Runs one stage (or "all") and returns the process exit code. Library errors
/// are caught here and mapped through ExitCode; nothing escapes.
[[nodiscard]] int run_command(const std::string& command, const RunConfig& cfg, const RunOptions& opt = {});

int cmd_constants(const RunConfig& cfg, const RunOptions& opt = {});
int cmd_lambda0(const RunConfig& cfg, const RunOptions& opt = {});
int cmd_ground_state(const RunConfig& cfg, const RunOptions& opt = {});
int cmd_expansion(const RunConfig& cfg, const RunOptions& opt = {});
int cmd_branch(const RunConfig& cfg, const RunOptions& opt = {});
int cmd_report(const RunConfig& cfg, const RunOptions& opt = {});

/// Ground state, v0 and constants as later stages see them: reloaded from the
/// profile files, curvature restored from the ODEs. Throws MissingDependency.
struct StoredCriticalData {
    GroundState gs;
    RadialProfile v0;
    ReducedEnergyConstants constants;
    TheoremCase theorem_case = TheoremCase::positive_eps;
};
[[nodiscard]] StoredCriticalData load_critical_data(const std::filesystem::path& dir, const std::string& digest);

/// Restores u'' = -5u'/r - |u|u - lambda u on a profile read from disk.
[[nodiscard]] RadialProfile with_solution_curvature(const RadialProfile& u, double lambda);
/// Restores v'' = -5v'/r - (2|u0| + lambda0) v - u0.
[[nodiscard]] RadialProfile with_linearized_curvature(const RadialProfile& v, const RadialProfile& u0, double lambda0);

}  // namespace bn6
