// sweep.hpp — Parameter sweeps, single-point deep dives, phase-diagram scans

#pragma once

#include <atomic>
#include <chrono>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "dicke/io.hpp"
#include "dicke/semiclassical.hpp"
#include "dicke/steady_state.hpp"

namespace dicke::cli {

enum class SweepVariable { U, G };

enum class Observable { Jz, NPhot, G2, LogNegativity, Purity, Fidelity00 };

inline const char* column_name(Observable o) {
    switch (o) {
        case Observable::Jz: return "jz";
        case Observable::NPhot: return "nphot";
        case Observable::G2: return "g2";
        case Observable::LogNegativity: return "log_negativity";
        case Observable::Purity: return "purity";
        case Observable::Fidelity00: return "fidelity_00";
    }
    return "?";
}

inline std::optional<Observable> observable_from_name(const std::string& name) {
    if (name == "jz") return Observable::Jz;
    if (name == "nphot") return Observable::NPhot;
    if (name == "g2") return Observable::G2;
    if (name == "log_negativity" || name == "logneg") return Observable::LogNegativity;
    if (name == "purity") return Observable::Purity;
    if (name == "fidelity_00" || name == "fidelity00") return Observable::Fidelity00;
    return std::nullopt;
}

struct SweepSpec {
    ModelParams base;                    // swept field is overwritten per point
    SweepVariable variable = SweepVariable::U;
    std::vector<double> grid;            // angular values (rad/us) of the swept variable
    std::vector<int> n_list;             // atom numbers, one sweep curve each
    std::vector<Observable> observables;
    std::string out_path;
    SolverOptions solver;
    int workers = 0;                     // 0 = hardware concurrency
    double point_timeout_s = 600.0;
    bool auto_raise_n_max = true;
    int n_max_cap = 40;

    void validate() const {
        base.validate();
        if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
        if (n_list.empty()) throw std::invalid_argument("sweep: empty N list");
        for (int n : n_list)
            if (n < 1) throw std::invalid_argument("sweep: N values must be >= 1");
        if (observables.empty())
            throw std::invalid_argument("sweep: no observables requested");
        for (Observable o : observables)
            if (o == Observable::Fidelity00)
                for (int n : n_list)
                    if (n % 2 != 0)
                        throw std::invalid_argument(
                            "sweep: fidelity_00 needs even N (|0,0> requires a Jz=0 level)");
    }
};

struct SolvedPoint {
    ModelParams params;
    SteadyStateResult steady;
    CutoffReport cutoff;
};

// Steady state with the truncation guard: n_max is raised until the top-level
// population check passes (or the cap is hit).
inline SolvedPoint solve_point(ModelParams params, const SolverOptions& solver_opts,
                               bool auto_raise_n_max = true, int n_max_cap = 40) {
    for (;;) {
        const SparseMatrix l = build_liouvillian(params);
        SolvedPoint point{params, solve_inverse_power(l, params.dims(), solver_opts), {}};
        point.cutoff = check_cutoff(point.steady.rho);
        if (point.cutoff.pass || !auto_raise_n_max || params.n_max >= n_max_cap)
            return point;
        params.n_max = std::min(params.n_max + 3, n_max_cap);
    }
}

namespace detail {

struct SweepRow {
    double swept_value = 0.0;  // angular
    int n_atoms = 0;
    std::vector<double> values;
    int n_max_used = 0;
    double p_top = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool degenerate = false;
    std::string error;
};

inline double evaluate_observable(Observable o, const SolvedPoint& point,
                                  const JointOps& ops) {
    switch (o) {
        case Observable::Jz:
            return expect(ops.jz, point.steady.rho).real();
        case Observable::NPhot:
            return expect(SparseMatrix(ops.a_dag * ops.a), point.steady.rho).real();
        case Observable::G2:
            return g2_zero(point.steady.rho);
        case Observable::LogNegativity:
            return log_negativity(point.steady.rho);
        case Observable::Purity:
            return purity(point.steady.rho);
        case Observable::Fidelity00: {
            const auto target = basis_state(point.params.dims(), 0,
                                            point.params.n_atoms / 2);
            return fidelity(point.steady.rho, target);
        }
    }
    throw std::logic_error("unknown observable");
}

// Reference values of the superradiant/limit-cycle branches where defined:
// gamma = <Jz>/N and the per-point photon number N |alpha|^2.
struct ScReference {
    std::optional<double> gamma_sra_plus, nphot_sra_plus;
    std::optional<double> gamma_srb, nphot_srb;
    std::optional<double> gamma_limit_cycle;
};

inline ScReference sc_reference(const ModelParams& p) {
    namespace sc = semiclassical;
    ScReference ref;
    for (const auto& fp : sc::fixed_points(p)) {
        if (!fp.exists) continue;
        switch (fp.label) {
            case sc::AttractorLabel::SraPlus:
                ref.gamma_sra_plus = fp.state.gamma;
                ref.nphot_sra_plus = p.n_atoms * std::norm(fp.state.alpha);
                break;
            case sc::AttractorLabel::SrbPlus:
                ref.gamma_srb = fp.state.gamma;
                ref.nphot_srb = p.n_atoms * std::norm(fp.state.alpha);
                break;
            case sc::AttractorLabel::LimitCycle:
                ref.gamma_limit_cycle = fp.state.gamma;
                break;
            default:
                break;
        }
    }
    return ref;
}

inline std::string opt_cell(const std::optional<double>& v) {
    return v ? io::fmt(*v) : std::string{};
}

template <class Work>
inline void run_pool(std::size_t n_jobs, int workers, Work&& work) {
    unsigned n_threads = workers > 0 ? static_cast<unsigned>(workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_jobs));
    if (n_threads <= 1) {
        for (std::size_t k = 0; k < n_jobs; ++k) work(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= n_jobs) return;
                work(k);
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

struct SweepOutcome {
    std::string csv;
    int failed_points = 0;
};

inline SweepOutcome run_sweep(const SweepSpec& spec) {
    spec.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;

    struct Job {
        double value;
        int n_atoms;
    };
    std::vector<Job> jobs;
    for (int n : spec.n_list)
        for (double v : spec.grid) jobs.push_back({v, n});

    std::vector<detail::SweepRow> rows(jobs.size());
    detail::run_pool(jobs.size(), spec.workers, [&](std::size_t k) {
        ModelParams p = spec.base;
        p.n_atoms = jobs[k].n_atoms;
        if (spec.variable == SweepVariable::U)
            p.u = jobs[k].value;
        else
            p.g = jobs[k].value;
        detail::SweepRow& row = rows[k];
        row.swept_value = jobs[k].value;
        row.n_atoms = p.n_atoms;
        try {
            SolverOptions solver = spec.solver;
            if (spec.point_timeout_s > 0)
                solver.deadline = std::chrono::steady_clock::now() +
                                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(spec.point_timeout_s));
            const SolvedPoint point =
                solve_point(p, solver, spec.auto_raise_n_max, spec.n_max_cap);
            const JointOps ops = build_joint_ops(point.params.dims());
            for (Observable o : spec.observables)
                row.values.push_back(detail::evaluate_observable(o, point, ops));
            row.n_max_used = point.params.n_max;
            row.p_top = point.cutoff.top_population;
            row.residual = point.steady.residual;
            row.iterations = point.steady.iterations;
            row.degenerate = point.steady.degenerate_nullspace;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });

    std::ostringstream os;
    os << io::param_header(spec.base);
    os << "# sweep_variable=" << (spec.variable == SweepVariable::U ? "u" : "g") << "\n";
    os << (spec.variable == SweepVariable::U ? "u_mhz" : "g_mhz") << ",n_atoms";
    for (Observable o : spec.observables) os << ',' << column_name(o);
    os << ",sc_gamma_sra_plus,sc_nphot_sra_plus,sc_gamma_srb,sc_nphot_srb,"
          "sc_gamma_limit_cycle,n_max_used,p_top,residual,iterations,degenerate,error\n";

    int failed = 0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const auto& row = rows[k];
        ModelParams p = spec.base;
        p.n_atoms = row.n_atoms;
        if (spec.variable == SweepVariable::U)
            p.u = row.swept_value;
        else
            p.g = row.swept_value;
        const auto ref = detail::sc_reference(p);
        os << io::fmt(row.swept_value / two_pi) << ',' << row.n_atoms;
        if (row.error.empty()) {
            for (double v : row.values) os << ',' << io::fmt(v);
        } else {
            ++failed;
            for (std::size_t i = 0; i < spec.observables.size(); ++i) os << ',';
        }
        os << ',' << detail::opt_cell(ref.gamma_sra_plus) << ','
           << detail::opt_cell(ref.nphot_sra_plus) << ',' << detail::opt_cell(ref.gamma_srb)
           << ',' << detail::opt_cell(ref.nphot_srb) << ','
           << detail::opt_cell(ref.gamma_limit_cycle);
        if (row.error.empty()) {
            os << ',' << row.n_max_used << ',' << io::fmt(row.p_top) << ','
               << io::fmt(row.residual) << ',' << row.iterations << ','
               << (row.degenerate ? 1 : 0) << ',';
        } else {
            std::string msg = row.error;
            for (char& c : msg)
                if (c == ',' || c == '\n') c = ';';
            os << ",,,,," << msg;
        }
        os << "\n";
    }

    SweepOutcome out{os.str(), failed};
    if (!spec.out_path.empty()) io::write_file(spec.out_path, out.csv);
    return out;
}

// --------------------------- single-point deep dive -------------------------

struct PointSpec {
    ModelParams params;
    std::string out_prefix;
    bool scalars = true;
    bool wigner = false;
    int wigner_points = 61;
    double wigner_extent = 3.0;
    bool spin_q = false;
    int q_theta_points = 65;
    int q_phi_points = 128;
    bool q_flip_poles = false;  // put the down-spin pole at theta = pi instead of 0
    bool correlation = false;
    double corr_dt = 0.01;
    double corr_max_t = 1000.0;
    bool spectrum = false;
    SolverOptions solver;
    bool auto_raise_n_max = true;
};

struct PointOutcome {
    nlohmann::json manifest;
    std::vector<std::string> files;
    ModelParams params_used;
};

inline PointOutcome run_point(const PointSpec& spec) {
    spec.params.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const SolvedPoint point = solve_point(spec.params, spec.solver, spec.auto_raise_n_max);
    const ModelParams& p = point.params;
    const JointOps ops = build_joint_ops(p.dims());

    PointOutcome out;
    out.params_used = p;
    nlohmann::json& m = out.manifest;
    m["version"] = kVersion;
    m["params"]["mhz"] = {{"nu0", p.omega0 / two_pi}, {"nu", p.omega / two_pi},
                          {"nu_kappa", p.kappa / two_pi}, {"nu_g", p.g / two_pi},
                          {"nu_u", p.u / two_pi}};
    m["params"]["angular_rad_per_us"] = {{"omega0", p.omega0}, {"omega", p.omega},
                                         {"kappa", p.kappa}, {"g", p.g}, {"u", p.u}};
    m["params"]["n_atoms"] = p.n_atoms;
    m["params"]["n_max"] = p.n_max;
    m["solver"] = {{"iterations", point.steady.iterations},
                   {"residual", point.steady.residual},
                   {"shift_used", point.steady.shift_used},
                   {"degenerate_nullspace", point.steady.degenerate_nullspace},
                   {"p_top", point.cutoff.top_population},
                   {"cutoff_pass", point.cutoff.pass}};

    const auto emit = [&](const std::string& suffix, const std::string& content) {
        const std::string path = spec.out_prefix + "_" + suffix;
        io::write_file(path, content);
        out.files.push_back(path);
    };

    if (spec.scalars) {
        std::ostringstream os;
        os << io::param_header(p) << "observable,value\n";
        os << "jz," << io::fmt(expect(ops.jz, point.steady.rho).real()) << "\n";
        os << "nphot,"
           << io::fmt(expect(SparseMatrix(ops.a_dag * ops.a), point.steady.rho).real())
           << "\n";
        try {
            os << "g2," << io::fmt(g2_zero(point.steady.rho)) << "\n";
        } catch (const VacuumFieldError&) {
            os << "g2,\n";
        }
        os << "log_negativity," << io::fmt(log_negativity(point.steady.rho)) << "\n";
        os << "purity," << io::fmt(purity(point.steady.rho)) << "\n";
        if (p.n_atoms % 2 == 0)
            os << "fidelity_00,"
               << io::fmt(fidelity(point.steady.rho, basis_state(p.dims(), 0, p.n_atoms / 2)))
               << "\n";
        emit("scalars.csv", os.str());
    }

    if (spec.wigner) {
        std::vector<double> xs(spec.wigner_points), ys(spec.wigner_points);
        for (int i = 0; i < spec.wigner_points; ++i) {
            const double v = -spec.wigner_extent +
                             2.0 * spec.wigner_extent * i / (spec.wigner_points - 1.0);
            xs[i] = v;
            ys[i] = v;
        }
        const auto grid = wigner(partial_trace(point.steady.rho, Subsystem::Cavity),
                                 std::move(xs), std::move(ys));
        emit("wigner.csv", io::wigner_csv(p, grid));
    }

    if (spec.spin_q) {
        std::vector<double> thetas(spec.q_theta_points), phis(spec.q_phi_points);
        for (int i = 0; i < spec.q_theta_points; ++i)
            thetas[i] = std::numbers::pi * i / (spec.q_theta_points - 1.0);
        for (int j = 0; j < spec.q_phi_points; ++j)
            phis[j] = 2.0 * std::numbers::pi * j / spec.q_phi_points;
        DenseMatrix rho_spin = partial_trace(point.steady.rho, Subsystem::Spin);
        if (spec.q_flip_poles) {
            // reverse the excitation basis so the down-spin pole plots at theta = pi
            const Eigen::Index d = rho_spin.rows();
            DenseMatrix flipped(d, d);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j)
                    flipped(i, j) = rho_spin(d - 1 - i, d - 1 - j);
            rho_spin = flipped;
        }
        const auto grid = spin_qfunction(rho_spin, std::move(thetas), std::move(phis));
        emit("qfunc.csv", io::spin_q_csv(p, grid));
    }

    if (spec.correlation || spec.spectrum) {
        const SparseMatrix l = build_liouvillian(p, ops);
        const TimeSeries c = correlation_until_decayed(
            l, point.steady.rho, CorrelationWindow{spec.corr_dt, spec.corr_max_t, 1e-3});
        emit("corr.csv", io::timeseries_csv(p, c));
        m["correlation"] = {{"samples", c.t.size()}, {"t_end", c.t.back()}};
        if (spec.spectrum) {
            try {
                const Spectrum s = power_spectrum(c);
                emit("spectrum.csv", io::spectrum_csv(p, s));
                m["undecayed_correlation"] = false;
            } catch (const UndecayedCorrelationError&) {
                m["undecayed_correlation"] = true;  // spectrum file deliberately omitted
            }
        }
    }

    m["files"] = out.files;
    io::write_file(spec.out_prefix + "_manifest.json", m.dump(2) + "\n");
    return out;
}

// --------------------------- phase diagram ----------------------------------

struct PhaseDiagramSpec {
    ModelParams base;
    std::vector<double> g_grid;  // angular
    std::vector<double> u_grid;  // angular
    int n_seeds = 8;
    semiclassical::ClassifyOptions classify;
    std::string out_path;
    int workers = 0;
    bool progress = false;

    void validate() const {
        base.validate();
        if (g_grid.empty() || u_grid.empty())
            throw std::invalid_argument("phase-diagram: empty grid");
        if (n_seeds < 4) throw std::invalid_argument("phase-diagram: need n_seeds >= 4");
    }
};

inline std::string run_phase_diagram(const PhaseDiagramSpec& spec) {
    spec.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    struct Cell {
        double g, u;
    };
    std::vector<Cell> cells;
    for (double g : spec.g_grid)
        for (double u : spec.u_grid) cells.push_back({g, u});

    std::vector<std::string> labels(cells.size());
    std::atomic<std::size_t> done{0};
    detail::run_pool(cells.size(), spec.workers, [&](std::size_t k) {
        const auto cell = semiclassical::classify_cell(spec.base, cells[k].g, cells[k].u,
                                                       spec.n_seeds, spec.classify);
        std::string joined;
        for (const auto& l : cell.labels) {
            if (!joined.empty()) joined += '+';
            joined += semiclassical::to_string(l);
        }
        labels[k] = joined;
        const std::size_t n = ++done;
        if (spec.progress && (n % 16 == 0 || n == cells.size()))
            std::fprintf(stderr, "phase-diagram: %zu/%zu cells\n", n, cells.size());
    });

    std::ostringstream os;
    os << io::param_header(spec.base);
    os << "g_mhz,u_mhz,labels\n";
    for (std::size_t k = 0; k < cells.size(); ++k)
        os << io::fmt(cells[k].g / two_pi) << ',' << io::fmt(cells[k].u / two_pi) << ','
           << labels[k] << "\n";
    const std::string csv = os.str();
    if (!spec.out_path.empty()) io::write_file(spec.out_path, csv);
    return csv;
}

}  // namespace dicke::cli
