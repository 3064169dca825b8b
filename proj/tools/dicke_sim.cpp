// dicke-sim — steady states, sweeps, and mean-field phase diagrams on the command line

#include <CLI11.hpp>

#include <cstdio>
#include <numbers>

#include "dicke/sweep.hpp"
#include "dicke/version.hpp"

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CommonArgs {
    double nu0 = 0.05, nu = 1.0, nu_kappa = 0.2, nu_g = 0.01, nu_u = 0.0;
    int n_atoms = 10;
    int n_max = 9;
    double tol = 1e-6;
    std::string out = "dicke_out";
    int workers = 0;

    dicke::ModelParams params() const {
        return dicke::params_from_mhz(nu0, nu, nu_kappa, nu_g, nu_u, n_atoms, n_max);
    }
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--omega0", args.nu0, "atomic frequency nu0 in MHz")->capture_default_str();
    cmd->add_option("--omega", args.nu, "cavity frequency nu in MHz")->capture_default_str();
    cmd->add_option("--kappa", args.nu_kappa, "cavity decay nu_kappa in MHz")->capture_default_str();
    cmd->add_option("--g", args.nu_g, "linear coupling nu_g in MHz")->capture_default_str();
    cmd->add_option("--u", args.nu_u, "non-linear coupling nu_u in MHz")->capture_default_str();
    cmd->add_option("--n-atoms", args.n_atoms, "atom number N")->capture_default_str();
    cmd->add_option("--n-max", args.n_max, "Fock cutoff")->capture_default_str();
    cmd->add_option("--tol", args.tol, "steady-state residual tolerance")->capture_default_str();
    cmd->add_option("--out", args.out, "output path (or prefix)")->capture_default_str();
    cmd->add_option("--workers", args.workers, "worker threads, 0 = auto")->capture_default_str();
    cmd->set_config("--config", "", "key=value config file; flags override");
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (step <= 0 || hi < lo) throw CLI::ValidationError("grid", "requires min <= max, step > 0");
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-12 * std::max(1.0, std::abs(hi)); v += step)
        grid.push_back(v);
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("dicke-sim v") + dicke::kVersion +
                 " — dissipative Dicke model with non-linear atom-photon coupling"};
    app.require_subcommand(1);

    // ---- sweep ----
    CommonArgs sweep_args;
    std::string sweep_var = "u";
    double sweep_min = -10.0, sweep_max = 10.0, sweep_step = 0.5;
    std::vector<double> sweep_values;
    std::vector<int> n_list;
    std::string observables = "jz,nphot,g2";
    auto* sweep_cmd = app.add_subcommand("sweep", "steady-state observables along a cut");
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--sweep-var", sweep_var, "swept variable: u or g")
        ->check(CLI::IsMember({"u", "g"}))->capture_default_str();
    sweep_cmd->add_option("--sweep-min", sweep_min, "grid start in MHz")->capture_default_str();
    sweep_cmd->add_option("--sweep-max", sweep_max, "grid end in MHz")->capture_default_str();
    sweep_cmd->add_option("--sweep-step", sweep_step, "grid step in MHz")->capture_default_str();
    sweep_cmd->add_option("--sweep-values", sweep_values,
                          "explicit grid values in MHz (overrides min/max/step)");
    sweep_cmd->add_option("--n-list", n_list, "atom numbers (defaults to --n-atoms)");
    sweep_cmd->add_option("--observables", observables,
                          "comma list: jz,nphot,g2,log_negativity,purity,fidelity_00")
        ->capture_default_str();

    // ---- point ----
    CommonArgs point_args;
    bool do_wigner = false, do_q = false, do_corr = false, do_spectrum = false;
    bool q_flip = false;
    int wigner_points = 61;
    double wigner_extent = 3.0;
    double corr_dt = 0.01, corr_tmax = 1000.0;
    auto* point_cmd = app.add_subcommand("point", "single-point steady state deep dive");
    add_common(point_cmd, point_args);
    point_cmd->add_flag("--wigner", do_wigner, "emit the cavity Wigner function");
    point_cmd->add_option("--wigner-points", wigner_points, "grid points per axis")
        ->capture_default_str();
    point_cmd->add_option("--wigner-extent", wigner_extent, "grid extent in x,y")
        ->capture_default_str();
    point_cmd->add_flag("--spin-q", do_q, "emit the atomic Q-function");
    point_cmd->add_flag("--q-flip-poles", q_flip,
                        "plot the down-spin pole at theta = pi instead of 0");
    point_cmd->add_flag("--correlation", do_corr, "emit C(t)");
    point_cmd->add_option("--corr-dt", corr_dt, "correlation sample spacing in us")
        ->capture_default_str();
    point_cmd->add_option("--corr-tmax", corr_tmax, "correlation window cap in us")
        ->capture_default_str();
    point_cmd->add_flag("--spectrum", do_spectrum, "emit S(nu) (implies --correlation)");

    // ---- phase-diagram ----
    CommonArgs pd_args;
    double g_min = 0.0, g_max = 0.2, u_min = -10.0, u_max = 10.0;
    int g_steps = 20, u_steps = 20, n_seeds = 8;
    auto* pd_cmd = app.add_subcommand("phase-diagram", "mean-field attractor map over (g, U)");
    add_common(pd_cmd, pd_args);
    pd_cmd->add_option("--g-min", g_min, "g grid start in MHz")->capture_default_str();
    pd_cmd->add_option("--g-max", g_max, "g grid end in MHz")->capture_default_str();
    pd_cmd->add_option("--g-steps", g_steps, "g grid points")->capture_default_str();
    pd_cmd->add_option("--u-min", u_min, "U grid start in MHz")->capture_default_str();
    pd_cmd->add_option("--u-max", u_max, "U grid end in MHz")->capture_default_str();
    pd_cmd->add_option("--u-steps", u_steps, "U grid points")->capture_default_str();
    pd_cmd->add_option("--n-seeds", n_seeds, "initial conditions per cell")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep_cmd->parsed()) {
            dicke::cli::SweepSpec spec;
            spec.base = sweep_args.params();
            spec.variable = sweep_var == "u" ? dicke::cli::SweepVariable::U
                                             : dicke::cli::SweepVariable::G;
            if (sweep_values.empty())
                for (double v : make_grid(sweep_min, sweep_max, sweep_step))
                    spec.grid.push_back(kTwoPi * v);
            else
                for (double v : sweep_values) spec.grid.push_back(kTwoPi * v);
            spec.n_list = n_list.empty() ? std::vector<int>{sweep_args.n_atoms} : n_list;
            std::stringstream names(observables);
            std::string name;
            while (std::getline(names, name, ',')) {
                if (name.empty()) continue;
                const auto o = dicke::cli::observable_from_name(name);
                if (!o) throw std::invalid_argument("unknown observable: " + name);
                spec.observables.push_back(*o);
            }
            spec.out_path = sweep_args.out;
            spec.solver.tol = sweep_args.tol;
            spec.workers = sweep_args.workers;
            const auto outcome = dicke::cli::run_sweep(spec);
            std::fprintf(stderr, "sweep: %zu points, %d failed -> %s\n",
                         spec.grid.size() * spec.n_list.size(), outcome.failed_points,
                         spec.out_path.c_str());
            return outcome.failed_points == 0 ? 0 : 1;
        }

        if (point_cmd->parsed()) {
            dicke::cli::PointSpec spec;
            spec.params = point_args.params();
            spec.out_prefix = point_args.out;
            spec.wigner = do_wigner;
            spec.wigner_points = wigner_points;
            spec.wigner_extent = wigner_extent;
            spec.spin_q = do_q;
            spec.q_flip_poles = q_flip;
            spec.correlation = do_corr || do_spectrum;
            spec.corr_dt = corr_dt;
            spec.corr_max_t = corr_tmax;
            spec.spectrum = do_spectrum;
            spec.solver.tol = point_args.tol;
            const auto outcome = dicke::cli::run_point(spec);
            std::fprintf(stderr, "point: wrote %zu files (prefix %s)\n",
                         outcome.files.size() + 1, spec.out_prefix.c_str());
            return 0;
        }

        if (pd_cmd->parsed()) {
            dicke::cli::PhaseDiagramSpec spec;
            spec.base = pd_args.params();
            if (g_steps < 1 || u_steps < 1)
                throw std::invalid_argument("phase-diagram: steps must be >= 1");
            for (int i = 0; i < g_steps; ++i)
                spec.g_grid.push_back(kTwoPi * (g_min + (g_max - g_min) *
                                                          (g_steps == 1 ? 0.0 : double(i) / (g_steps - 1))));
            for (int i = 0; i < u_steps; ++i)
                spec.u_grid.push_back(kTwoPi * (u_min + (u_max - u_min) *
                                                          (u_steps == 1 ? 0.0 : double(i) / (u_steps - 1))));
            spec.n_seeds = n_seeds;
            spec.out_path = pd_args.out;
            spec.workers = pd_args.workers;
            spec.progress = true;
            dicke::cli::run_phase_diagram(spec);
            std::fprintf(stderr, "phase-diagram: %zu cells -> %s\n",
                         spec.g_grid.size() * spec.u_grid.size(), spec.out_path.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
