#include "ringlab/cli.hpp"

#include <cmath>

namespace ringlab {

const char* to_string(Command c) {
    switch (c) {
        case Command::equilibria: return "equilibria";
        case Command::portrait: return "portrait";
        case Command::rings: return "rings";
        case Command::stagnation: return "stagnation";
        case Command::melnikov: return "melnikov";
        case Command::poincare: return "poincare";
    }
    return "?";
}

Command command_from_string(const std::string& s) {
    for (Command c : {Command::equilibria, Command::portrait, Command::rings,
                      Command::stagnation, Command::melnikov, Command::poincare})
        if (s == to_string(c)) return c;
    throw ConfigError("unknown command '" + s + "'");
}

void RunConfig::validate() const {
    model.validate();
    integrator.validate();
    if (!std::isfinite(oscillation.mu)) throw ConfigError("mu must be finite");
    if (omega_given && !(model.Omega > 0.0)) throw ConfigError("omega must be positive");
    if (seeds < 0 || iterations < 0) throw ConfigError("seeds and iterations must be >= 0");
    if (tau_samples < 16) throw ConfigError("tau samples must be at least 16");
    if (!(periods > 0.0) || samples < 2) throw ConfigError("need periods > 0 and samples >= 2");
    if (output_dir.empty()) throw ConfigError("output directory must not be empty");
}

namespace {

RunConfig base(Command cmd, const std::string& name, double alpha) {
    RunConfig c;
    c.command = cmd;
    c.case_name = name;
    c.model.alpha = alpha;
    c.model.kappa = 1.5;
    c.model.chi = 1000.0;
    c.type = EquilibriumType::I;
    return c;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"1a", "1b", "1c", "2a", "2b", "2c", "fig1", "fig2",
            "fig3", "fig4", "fig5", "fig6", "fig7"};
}

RunConfig preset_case(const std::string& name) {
    // Case 1: α=5, Ω=ν, κ=1.5; Case 2: α=20, Ω=ν, κ=1.5.
    if (name == "1a" || name == "1b" || name == "1c") {
        RunConfig c = base(Command::poincare, name, 5.0);
        c.oscillation.mu = name == "1a" ? 0.0 : name == "1b" ? 0.001 : 0.01;
        return c;
    }
    if (name == "2a" || name == "2b" || name == "2c") {
        RunConfig c = base(Command::poincare, name, 20.0);
        c.oscillation.mu = name == "2a" ? 0.0 : name == "2b" ? 4e-5 : 4e-4;
        return c;
    }
    if (name == "fig1" || name == "fig2" || name == "fig3" || name == "fig4") {
        RunConfig c = base(Command::portrait, name, 5.0);
        const EquilibriumType types[] = {EquilibriumType::I, EquilibriumType::II,
                                         EquilibriumType::III, EquilibriumType::IV};
        c.type = types[name[3] - '1'];
        return c;
    }
    if (name == "fig5") return base(Command::portrait, name, 0.1);
    // Figs. 6–7, left panels (α=5, μ=0.01). The right panels' α=20, μ=4e-3
    // exceeds ε* at α=20 and is rejected if requested explicitly.
    if (name == "fig6") {
        RunConfig c = base(Command::rings, name, 5.0);
        c.oscillation.mu = 0.01;
        return c;
    }
    if (name == "fig7") {
        RunConfig c = base(Command::stagnation, name, 5.0);
        c.oscillation.mu = 0.01;
        return c;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace ringlab
