#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ringlab/cli.hpp"

using namespace ringlab;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("ringlab_test_" + name);
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig parse(std::vector<const char*> args) {
    args.insert(args.begin(), "ringlab");
    return parse_command_line(static_cast<int>(args.size()), args.data());
}

}  // namespace

TEST_CASE("csv and number formatting") {
    CHECK(io::csv_field("plain") == "plain");
    CHECK(io::csv_field("a,b") == "\"a,b\"");
    CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::csv_field("two\nlines") == "\"two\nlines\"");
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23})
        CHECK(std::stod(io::format_number(v)) == v);
    CHECK(io::format_number(std::nan("")) == "nan");

    io::CsvTable t({"a", "b"});
    t.add_row(std::vector<double>{1.0, 2.5});
    t.add_row(std::vector<std::string>{"x,y", "z"});
    CHECK(t.str() == "a,b\r\n1,2.5\r\n\"x,y\",z\r\n");
    CHECK_THROWS_AS(t.add_row(std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("presets") {
    const auto c = preset_case("1c");
    CHECK(c.command == Command::poincare);
    CHECK(c.oscillation.mu == 0.01);
    CHECK(c.model.alpha == 5.0);
    CHECK(c.model.kappa == 1.5);
    CHECK(c.model.chi == 1000.0);
    CHECK(preset_case("2b").oscillation.mu == 4e-5);
    CHECK(preset_case("2c").model.alpha == 20.0);
    const auto f5 = preset_case("fig5");
    CHECK(f5.model.alpha == 0.1);
    CHECK(f5.type == EquilibriumType::I);
    CHECK(preset_case("fig4").type == EquilibriumType::IV);
    CHECK(preset_names().size() == 13);
    CHECK_THROWS_AS(preset_case("fig9"), ConfigError);
}

TEST_CASE("command line parsing") {
    const auto a = parse({"equilibria", "--alpha", "5", "--kappa", "1.5", "--type", "II", "--out", "o"});
    CHECK(a.command == Command::equilibria);
    CHECK(a.type == EquilibriumType::II);
    CHECK(a.output_dir == "o");
    CHECK_FALSE(a.omega_given);

    const auto b = parse({"--case", "1b", "--iterations", "10", "--omega", "8"});
    CHECK(b.command == Command::poincare);
    CHECK(b.oscillation.mu == 0.001);
    CHECK(b.iterations == 10);
    CHECK(b.omega_given);
    CHECK(b.model.Omega == 8.0);

    const auto c = parse({"melnikov", "--case", "fig6"});
    CHECK(c.command == Command::melnikov);
    CHECK(c.oscillation.mu == 0.01);

    CHECK(parse({"poincare", "--long-run"}).long_run);
    CHECK_THROWS_AS(parse({}), ConfigError);
    CHECK_THROWS_AS(parse({"explode"}), ConfigError);
    CHECK_THROWS_AS(parse({"equilibria", "--type", "V"}), ConfigError);
    CHECK_THROWS_AS(parse({"equilibria", "--alpha"}), ConfigError);
    CHECK_THROWS_AS(parse({"equilibria", "--kappa", "0.5"}), ConfigError);
}

TEST_CASE("equilibria run") {
    RunConfig cfg = parse({"equilibria", "--alpha", "5", "--kappa", "1.5", "--type", "I"});
    cfg.output_dir = scratch("eq").string();
    const auto r = run(cfg);
    REQUIRE(r.exit_code == 0);
    const auto& m = r.manifest;
    CHECK(m["schema_version"] == "1.0");
    CHECK(m["status"] == "ok");
    CHECK(m["equilibrium"]["s1_hat"].get<double>() == Approx(0.06).epsilon(0.15));
    CHECK(m["equilibrium"]["s2_hat"].get<double>() == Approx(0.94).epsilon(0.15));
    CHECK(m["equilibrium"]["s_hat"].get<double>() == Approx(0.24).epsilon(0.15));
    CHECK(m["equilibrium"]["x_plus"].get<double>() == Approx(0.45).epsilon(0.15));
    CHECK(m["model"]["Omega"].get<double>() == m["equilibrium"]["nu"].get<double>());
    CHECK(m["invariants"].contains("radii_residual"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "manifest.json"));
    const auto csv = slurp(fs::path(cfg.output_dir) / "fixed_points.csv");
    CHECK(csv.rfind("label,kind,s,x,", 0) == 0);
}

TEST_CASE("melnikov run") {
    RunConfig cfg = parse({"melnikov", "--alpha", "5"});
    cfg.output_dir = scratch("mel").string();
    const auto r = run(cfg);
    REQUIRE(r.exit_code == 0);
    CHECK(r.manifest["results"]["C"].get<double>() > 0.0);
    CHECK(r.manifest["results"]["relative_residual"].get<double>() < 0.02);
}

TEST_CASE("deterministic outputs") {
    RunConfig cfg = parse({"portrait", "--seeds", "3"});
    cfg.output_dir = scratch("det_a").string();
    REQUIRE(run(cfg).exit_code == 0);
    const std::string a = slurp(fs::path(cfg.output_dir) / "streamlines.csv");
    cfg.output_dir = scratch("det_b").string();
    REQUIRE(run(cfg).exit_code == 0);
    CHECK(a == slurp(fs::path(cfg.output_dir) / "streamlines.csv"));
    CHECK(a.size() > 100);
}

TEST_CASE("error records and exit codes") {
    SUBCASE("amplitude beyond the admissible range is a domain error") {
        RunConfig cfg = parse({"rings", "--alpha", "20", "--mu", "4e-3"});
        cfg.output_dir = scratch("err").string();
        const auto r = run(cfg);
        CHECK(r.exit_code == 1);
        CHECK(r.manifest["status"] == "error");
        CHECK(r.manifest["error"]["kind"] == "domain");
        CHECK(fs::exists(fs::path(cfg.output_dir) / "error.json"));
    }
    SUBCASE("no equilibrium of the requested type is a convergence error") {
        RunConfig cfg = parse({"equilibria", "--coupling", "printed"});
        cfg.output_dir = scratch("err2").string();
        CHECK(run(cfg).exit_code == 2);
    }
    CHECK(exit_code_for(ConfigError("x")) == 1);
    CHECK(exit_code_for(ConvergenceError("x")) == 2);
    CHECK(exit_code_for(SingularityError("x")) == 3);
    CHECK(exit_code_for(std::runtime_error("x")) == 3);
}
