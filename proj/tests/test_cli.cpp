#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dicke/sweep.hpp"

using namespace dicke;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "dicke_cli_test";
    fs::create_directories(dir);
    return dir;
}

cli::SweepSpec small_sweep() {
    cli::SweepSpec spec;
    spec.base = params_from_mhz(0.05, 1.0, 0.2, 0.05, 0.0, 2, 3);
    spec.variable = cli::SweepVariable::U;
    spec.grid = {-2.0 * spec.base.omega, 0.0, 2.0 * spec.base.omega};
    spec.n_list = {2};
    spec.observables = {cli::Observable::Jz, cli::Observable::NPhot};
    spec.workers = 2;
    return spec;
}

}  // namespace

TEST_CASE("sweep validation happens before any solve") {
    cli::SweepSpec spec = small_sweep();
    SECTION("empty observables") {
        spec.observables.clear();
        CHECK_THROWS_AS(cli::run_sweep(spec), std::invalid_argument);
    }
    SECTION("empty grid") {
        spec.grid.clear();
        CHECK_THROWS_AS(cli::run_sweep(spec), std::invalid_argument);
    }
    SECTION("fidelity of |0,0> needs even N") {
        spec.observables = {cli::Observable::Fidelity00};
        spec.n_list = {3};
        CHECK_THROWS_AS(cli::run_sweep(spec), std::invalid_argument);
    }
}

TEST_CASE("sweep output is byte-identical across runs and embeds parameters") {
    const auto spec = small_sweep();
    const auto first = cli::run_sweep(spec);
    const auto second = cli::run_sweep(spec);
    CHECK(first.csv == second.csv);
    CHECK(first.failed_points == 0);
    CHECK(first.csv.find("# dicke-sim v") != std::string::npos);
    CHECK(first.csv.find("nu_g_mhz=0.05") != std::string::npos);
    CHECK(first.csv.find("u_mhz,n_atoms,jz,nphot") != std::string::npos);
    // one row per grid point
    CHECK(std::count(first.csv.begin(), first.csv.end(), '\n') >= 3 + 4);
}

TEST_CASE("sweep rows are independent of worker scheduling") {
    auto spec = small_sweep();
    spec.workers = 1;
    const auto serial = cli::run_sweep(spec);
    spec.workers = 4;
    const auto parallel = cli::run_sweep(spec);
    CHECK(serial.csv == parallel.csv);
}

TEST_CASE("per-point failures land in the error column and the sweep continues") {
    auto spec = small_sweep();
    spec.solver.max_iter = 1;       // impossible budget
    spec.solver.settle_tol = 1e-18;
    const auto outcome = cli::run_sweep(spec);
    CHECK(outcome.failed_points == static_cast<int>(spec.grid.size()));
    CHECK(outcome.csv.find("did not converge") != std::string::npos);
}

TEST_CASE("semiclassical reference columns appear where defined") {
    cli::SweepSpec spec = small_sweep();
    spec.grid = {-4.0 * spec.base.omega, 4.0 * spec.base.omega};
    spec.base.g = 0.1 * 2.0 * std::numbers::pi;
    const auto outcome = cli::run_sweep(spec);
    std::istringstream lines(outcome.csv);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line))
        if (!line.empty() && line[0] != '#') rows.push_back(line);
    REQUIRE(rows.size() == 3);  // header + 2 points
    // U = -4w row carries the SRB gamma reference 0.25
    CHECK(rows[1].find(",0.25,") != std::string::npos);
    // U = +4w row carries the limit-cycle gamma -0.25
    CHECK(rows[2].find(",-0.25,") != std::string::npos);
}

TEST_CASE("point command emits files and a manifest") {
    const fs::path dir = temp_dir();
    cli::PointSpec spec;
    spec.params = params_from_mhz(0.05, 1.0, 0.2, 0.05, 0.0, 2, 4);
    spec.out_prefix = (dir / "pt").string();
    spec.wigner = true;
    spec.wigner_points = 11;
    spec.spin_q = true;
    spec.q_theta_points = 9;
    spec.q_phi_points = 8;
    spec.correlation = true;
    spec.corr_dt = 0.05;
    spec.corr_max_t = 60.0;
    spec.spectrum = true;
    const auto outcome = cli::run_point(spec);

    CHECK(fs::exists(dir / "pt_scalars.csv"));
    CHECK(fs::exists(dir / "pt_wigner.csv"));
    CHECK(fs::exists(dir / "pt_qfunc.csv"));
    CHECK(fs::exists(dir / "pt_corr.csv"));
    CHECK(fs::exists(dir / "pt_manifest.json"));
    CHECK(outcome.manifest["solver"]["cutoff_pass"].get<bool>());
    CHECK(outcome.manifest["params"]["n_atoms"].get<int>() == 2);
    const std::string wigner_txt = slurp(dir / "pt_wigner.csv");
    CHECK(wigner_txt.find("x,y,w") != std::string::npos);
    CHECK(wigner_txt.find("# dicke-sim v") != std::string::npos);

    if (outcome.manifest["undecayed_correlation"].get<bool>()) {
        CHECK_FALSE(fs::exists(dir / "pt_spectrum.csv"));
    } else {
        CHECK(fs::exists(dir / "pt_spectrum.csv"));
    }
}

TEST_CASE("decoupled point flags the degenerate null space in the manifest") {
    const fs::path dir = temp_dir();
    cli::PointSpec spec;
    spec.params = params_from_mhz(0.05, 1.0, 0.2, 0.0, 0.0, 2, 3);
    spec.out_prefix = (dir / "g0").string();
    spec.scalars = true;
    const auto outcome = cli::run_point(spec);
    CHECK(outcome.manifest["solver"]["degenerate_nullspace"].get<bool>());
}

TEST_CASE("phase diagram CSV labels single cells like classify_attractor") {
    cli::PhaseDiagramSpec spec;
    spec.base = params_from_mhz(0.05, 1.0, 0.2, 0.01, 0.0, 10, 5);
    spec.g_grid = {0.01 * 2.0 * std::numbers::pi};
    spec.u_grid = {0.0};
    spec.n_seeds = 4;
    const std::string csv = cli::run_phase_diagram(spec);
    CHECK(csv.find("g_mhz,u_mhz,labels") != std::string::npos);
    CHECK(csv.find("normal") != std::string::npos);
    SECTION("malformed grid") {
        spec.g_grid.clear();
        CHECK_THROWS_AS(cli::run_phase_diagram(spec), std::invalid_argument);
    }
}

#ifdef DICKE_CLI_PATH
TEST_CASE("binary end-to-end: sweep subcommand", "[cli]") {
    const fs::path dir = temp_dir();
    const fs::path out = dir / "cli_sweep.csv";
    const std::string cmd = std::string(DICKE_CLI_PATH) +
                            " sweep --g 0.05 --n-atoms 2 --n-max 3"
                            " --sweep-var u --sweep-min -2 --sweep-max 2 --sweep-step 2"
                            " --observables jz,nphot --out " +
                            out.string() + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    CHECK(rc == 0);
    REQUIRE(fs::exists(out));
    const std::string csv = slurp(out);
    CHECK(csv.find("u_mhz,n_atoms,jz,nphot") != std::string::npos);
}

TEST_CASE("binary end-to-end: config file with flag override", "[cli]") {
    const fs::path dir = temp_dir();
    const fs::path cfg = dir / "sweep.cfg";
    {
        std::ofstream out(cfg);
        out << "g=0.05\nn-atoms=2\nn-max=3\nsweep-var=u\n"
               "sweep-min=0\nsweep-max=0\nsweep-step=1\nobservables=jz\n";
    }
    const fs::path out_a = dir / "cfg_a.csv";
    const std::string cmd = std::string(DICKE_CLI_PATH) + " sweep --config " +
                            cfg.string() + " --observables jz,nphot --out " +
                            out_a.string() + " 2>/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const std::string csv = slurp(out_a);
    CHECK(csv.find("nu_g_mhz=0.05") != std::string::npos);  // from config
    CHECK(csv.find(",jz,nphot") != std::string::npos);      // flag overrode config
}

TEST_CASE("binary end-to-end: invalid grid exits nonzero", "[cli]") {
    const std::string cmd = std::string(DICKE_CLI_PATH) +
                            " sweep --sweep-min 2 --sweep-max -2 --sweep-step 1"
                            " --out /tmp/never.csv 2>/dev/null";
    CHECK(std::system(cmd.c_str()) != 0);
}
#endif
