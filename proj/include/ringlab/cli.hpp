#pragma once

#include <string>
#include <vector>

#include "ringlab/equilibria.hpp"
#include "ringlab/oscillation.hpp"
#include "ringlab/output.hpp"

namespace ringlab {

enum class Command { equilibria, portrait, rings, stagnation, melnikov, poincare };

const char* to_string(Command c);
Command command_from_string(const std::string& s);

struct RunConfig {
    Command command = Command::equilibria;
    std::string case_name;              // preset the config came from, if any
    ModelParams model;
    bool omega_given = false;           // otherwise Ω = ν of the resolved equilibrium
    EquilibriumType type = EquilibriumType::I;
    OscillationSpec oscillation;
    IntegratorSpec integrator;
    bool step_given = false;            // otherwise the command's own default step
    std::string output_dir = "ringlab_out";
    int seeds = 0;                      // 0: command default
    int iterations = 0;                 // 0: command default
    int tau_samples = 32;
    double periods = 3.0;               // span of ring / stagnation runs, in 2π/ν
    int samples = 300;                  // output samples over that span
    double core_exclusion = -1.0;       // seed ladder; < 0: 5% of the larger ring radius
    bool long_run = false;              // Poincaré at step 1e-5, 3000 iterates

    void validate() const;
};

// Named reference configurations:
// 1a–1c, 2a–2c (Poincaré sections) and fig1–fig7.
RunConfig preset_case(const std::string& name);
std::vector<std::string> preset_names();

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> files;     // written, relative to output_dir
    io::Json manifest;                  // manifest or error record
};

// Exit codes: 0 ok (possibly degraded), 1 config/domain error,
// 2 convergence error, 3 singularity or other runtime error.
int exit_code_for(const std::exception& e);

// Runs one command, writes CSV datasets and manifest.json (or error.json).
RunOutcome run(const RunConfig& cfg);

// Parses argv (CLI11) into a config; throws ConfigError on bad input.
RunConfig parse_command_line(int argc, const char* const* argv);

int cli_main(int argc, const char* const* argv);

}  // namespace ringlab
