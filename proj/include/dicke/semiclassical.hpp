// semiclassical.hpp — Mean-field equations, fixed points, attractor classification

#pragma once

#include <Eigen/Eigenvalues>

#include <array>
#include <optional>
#include <vector>

#include "dicke/integrator.hpp"
#include "dicke/model.hpp"

namespace dicke::semiclassical {

// Mean-field variables alpha = <a>/sqrt(N), beta = <J->/N, gamma = <Jz>/N.
struct State {
    Cplx alpha{0.0, 0.0};
    Cplx beta{0.0, 0.0};
    double gamma = 0.0;

    double spin_length_sq() const { return std::norm(beta) + gamma * gamma; }
    bool physical() const { return spin_length_sq() <= 0.25 + 1e-12; }
};

using PackedState = Eigen::Matrix<double, 5, 1>;

inline PackedState pack(const State& s) {
    PackedState v;
    v << s.alpha.real(), s.alpha.imag(), s.beta.real(), s.beta.imag(), s.gamma;
    return v;
}

inline State unpack(const PackedState& v) {
    return State{Cplx(v[0], v[1]), Cplx(v[2], v[3]), v[4]};
}

// Equations of motion:
//   alpha_dot = -i (omega - i kappa + U gamma) alpha - i g (beta + conj(beta))
//   beta_dot  = -i (omega0 + U |alpha|^2) beta + 2 i g (alpha + conj(alpha)) gamma
//   gamma_dot =  i g (alpha + conj(alpha)) (beta - conj(beta))
inline State rhs(const ModelParams& p, const State& s) {
    const Cplx a_dot = -kI * (p.omega - kI * p.kappa + p.u * s.gamma) * s.alpha -
                       kI * p.g * (s.beta + std::conj(s.beta));
    const Cplx b_dot = -kI * (p.omega0 + p.u * std::norm(s.alpha)) * s.beta +
                       2.0 * kI * p.g * (s.alpha + std::conj(s.alpha)) * s.gamma;
    const Cplx g_dot = kI * p.g * (s.alpha + std::conj(s.alpha)) *
                       (s.beta - std::conj(s.beta));
    return State{a_dot, b_dot, g_dot.real()};
}

inline PackedState rhs_packed(const ModelParams& p, const PackedState& v) {
    const double wt = p.omega + p.u * v[4];
    const double w = p.omega0 + p.u * (v[0] * v[0] + v[1] * v[1]);
    PackedState d;
    d[0] = wt * v[1] - p.kappa * v[0];
    d[1] = -wt * v[0] - p.kappa * v[1] - 2.0 * p.g * v[2];
    d[2] = w * v[3];
    d[3] = -w * v[2] + 4.0 * p.g * v[0] * v[4];
    d[4] = -4.0 * p.g * v[0] * v[3];
    return d;
}

// Analytic Jacobian of rhs_packed.
inline Eigen::Matrix<double, 5, 5> jacobian(const ModelParams& p, const PackedState& v) {
    const double wt = p.omega + p.u * v[4];
    const double w = p.omega0 + p.u * (v[0] * v[0] + v[1] * v[1]);
    Eigen::Matrix<double, 5, 5> j;
    j << -p.kappa, wt, 0.0, 0.0, p.u * v[1],
         -wt, -p.kappa, -2.0 * p.g, 0.0, -p.u * v[0],
         2.0 * p.u * v[0] * v[3], 2.0 * p.u * v[1] * v[3], 0.0, w, 0.0,
         -2.0 * p.u * v[0] * v[2] + 4.0 * p.g * v[4], -2.0 * p.u * v[1] * v[2], -w, 0.0,
         4.0 * p.g * v[0],
         -4.0 * p.g * v[3], 0.0, 0.0, -4.0 * p.g * v[0], 0.0;
    return j;
}

// Largest real part over the Jacobian spectrum; the spin-length conservation
// contributes one structurally zero eigenvalue which is not excluded here.
inline double max_growth_rate(const ModelParams& p, const State& s) {
    Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> es(jacobian(p, pack(s)), false);
    return es.eigenvalues().real().maxCoeff();
}

inline bool is_stable(const ModelParams& p, const State& s, double tol = 1e-7) {
    return max_growth_rate(p, s) < tol;
}

struct Trajectory {
    std::vector<double> t;
    std::vector<State> states;
};

inline Trajectory integrate(const ModelParams& p, const State& s0, double t_final,
                            double tol = 1e-10, int n_out = 501) {
    if (!s0.physical())
        throw std::invalid_argument("integrate: unphysical initial condition");
    Trajectory traj;
    traj.t.reserve(n_out);
    traj.states.reserve(n_out);
    PackedState v = pack(s0);
    Dopri5<PackedState> stepper(tol);
    auto f = [&p](double, const PackedState& y) { return rhs_packed(p, y); };
    for (int k = 0; k < n_out; ++k) {
        const double t_now = t_final * k / (n_out - 1.0);
        if (k > 0) stepper.advance(f, v, traj.t.back(), t_now);
        traj.t.push_back(t_now);
        traj.states.push_back(unpack(v));
    }
    return traj;
}

// --------------------------- fixed points ----------------------------------

enum class AttractorLabel {
    Normal,
    Inverted,
    SraPlus,
    SraMinus,
    SrbPlus,
    SrbMinus,
    LimitCycle,
    Unresolved,
};

inline const char* to_string(AttractorLabel l) {
    switch (l) {
        case AttractorLabel::Normal: return "normal";
        case AttractorLabel::Inverted: return "inverted";
        case AttractorLabel::SraPlus: return "sra+";
        case AttractorLabel::SraMinus: return "sra-";
        case AttractorLabel::SrbPlus: return "srb+";
        case AttractorLabel::SrbMinus: return "srb-";
        case AttractorLabel::LimitCycle: return "limit_cycle";
        case AttractorLabel::Unresolved: return "unresolved";
    }
    return "?";
}

struct FixedPoint {
    AttractorLabel label = AttractorLabel::Unresolved;
    State state;
    bool exists = false;
    std::optional<bool> stable;
    // matching in classify_attractor also checks the (alpha, beta) -> -(alpha, beta)
    // image, which maps a superradiant point onto its symmetry partner
    bool z2_image_equivalent = false;
};

using FixedPointSet = std::vector<FixedPoint>;

// Critical couplings for the onset of superradiance. The growth of the SRA phase
// out of the normal (inverted) phase happens where the normal (inverted) branch
// loses stability; with gamma0 = -1/2 (+1/2) and wt = omega + U gamma0 the
// threshold is g^2 = -omega0 (kappa^2 + wt^2) / (8 gamma0 wt), defined when
// gamma0 * wt < 0. g_b exists for U < -2 omega only.
struct CriticalCouplings {
    std::optional<double> g_a_plus;   // onset from the normal phase
    std::optional<double> g_a_minus;  // onset from the inverted phase
    std::optional<double> g_b;
};

inline CriticalCouplings critical_couplings(const ModelParams& p) {
    CriticalCouplings out;
    const auto onset = [&](double gamma0) -> std::optional<double> {
        const double wt = p.omega + p.u * gamma0;
        const double radicand = -p.omega0 * (p.kappa * p.kappa + wt * wt) / (8.0 * gamma0 * wt);
        if (gamma0 * wt >= 0.0 || radicand <= 0.0) return std::nullopt;
        return std::sqrt(radicand);
    };
    out.g_a_plus = onset(-0.5);
    out.g_a_minus = onset(+0.5);
    if (p.u < -2.0 * p.omega) {
        const double radicand =
            p.omega0 * p.u / (4.0 * (p.omega * p.omega - 0.25 * p.u * p.u));
        if (radicand > 0.0) out.g_b = p.kappa * std::sqrt(radicand);
    }
    return out;
}

namespace detail {

// SRA gamma values solve  U(w0 U + 4g^2) gamma^2 + 2 w (w0 U + 4g^2) gamma
//                         + w0(w^2 + k^2) + U g^2 = 0
// on the maximal spin sphere |beta|^2 + gamma^2 = 1/4. At U -> 0 the finite
// root is gamma = -w0(w^2 + k^2)/(8 w g^2).
inline std::vector<double> sra_gammas(const ModelParams& p) {
    const double denom = p.omega0 * p.u + 4.0 * p.g * p.g;
    const double a = p.u * denom;
    const double b = 2.0 * p.omega * denom;
    const double c = p.omega0 * (p.omega * p.omega + p.kappa * p.kappa) + p.u * p.g * p.g;
    const double tiny = 1e-12 * p.omega * p.omega * std::max(p.omega, 1.0);
    std::vector<double> roots;
    if (std::abs(a) < tiny) {
        if (std::abs(b) > tiny) roots.push_back(-c / b);
        return roots;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return roots;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    roots.push_back(q / a);
    if (q != 0.0) roots.push_back(c / q);
    return roots;
}

inline std::optional<State> sra_state(const ModelParams& p, double gamma) {
    if (std::abs(gamma) > 0.5 + 1e-12) return std::nullopt;
    const double b2 = std::max(1.0 - 4.0 * gamma * gamma, 0.0);
    const double b_sum = std::sqrt(b2);  // beta real, + branch representative
    const double wt = p.omega + p.u * gamma;
    const Cplx alpha = -p.g * b_sum / Cplx(wt, -p.kappa);
    return State{alpha, Cplx(0.5 * b_sum, 0.0), gamma};
}

}  // namespace detail

// All labeled mean-field solutions with the physicality filters applied.
// SRA+/- are the two gamma roots (the + root continues the normal-phase onset
// and exists for U < 2 omega, the - root the inverted one, U < -2 omega); each
// stands for the pair related by (alpha, beta) -> -(alpha, beta). SRB+/- carry
// the alpha = +/- i sqrt(-omega0/U) sign; the Im(beta) sign is the one realized
// by the stable branch. The limit-cycle entry records the gamma = -omega/U
// plateau of the U >= 2 omega region (its alpha, beta are not stationary).
inline FixedPointSet fixed_points(const ModelParams& p) {
    FixedPointSet set;
    const auto add = [&](AttractorLabel label, State s, bool exists, bool z2) {
        FixedPoint fp;
        fp.label = label;
        fp.state = s;
        fp.exists = exists;
        fp.z2_image_equivalent = z2;
        if (exists && label != AttractorLabel::LimitCycle)
            fp.stable = is_stable(p, s);
        set.push_back(fp);
    };

    add(AttractorLabel::Normal, State{0.0, 0.0, -0.5}, true, false);
    add(AttractorLabel::Inverted, State{0.0, 0.0, +0.5}, true, false);

    // The + branch bifurcates out of the normal pole (gamma = -1/2 at its
    // threshold) and exists only for U < 2w; the - branch out of the inverted
    // pole, only for U < -2w. With one physical root the branch identity is the
    // pole it sits closer to.
    std::vector<State> sra;
    for (double g : detail::sra_gammas(p)) {
        if (auto s = detail::sra_state(p, g)) sra.push_back(*s);
    }
    std::optional<State> plus, minus;
    if (sra.size() == 2) {
        const bool first_lower = sra[0].gamma < sra[1].gamma;
        plus = first_lower ? sra[0] : sra[1];
        minus = first_lower ? sra[1] : sra[0];
        if (plus->gamma == minus->gamma) minus.reset();
    } else if (sra.size() == 1) {
        if (std::abs(sra[0].gamma + 0.5) <= std::abs(sra[0].gamma - 0.5))
            plus = sra[0];
        else
            minus = sra[0];
    }
    if (plus && p.u >= 2.0 * p.omega) plus.reset();
    if (minus && p.u >= -2.0 * p.omega) minus.reset();
    add(AttractorLabel::SraPlus, plus.value_or(State{}), plus.has_value(), true);
    add(AttractorLabel::SraMinus, minus.value_or(State{}), minus.has_value(), true);

    // SRB: gamma = -w/U, |alpha|^2 = -w0/U, Re(beta) from the alpha equation,
    // Im(beta) from the spin sphere
    bool srb_exists = false;
    State srb_plus, srb_minus;
    if (p.u < -2.0 * p.omega && p.g > 0.0 && p.kappa > 0.0) {
        const double gamma = -p.omega / p.u;
        const double alpha_sq = -p.omega0 / p.u;
        const double b_sum_sq = p.kappa * p.kappa * alpha_sq / (p.g * p.g);
        const double im_beta_sq = 0.25 - gamma * gamma - 0.25 * b_sum_sq;
        if (im_beta_sq >= 0.0) {
            srb_exists = true;
            const double b_sum = std::sqrt(b_sum_sq);
            const double im_beta = std::sqrt(im_beta_sq);
            // alpha = -i g B / kappa with B = beta + conj(beta); B < 0 gives the
            // +i sqrt(-w0/U) branch. The stable pairing has sign(Im beta) = sign(B).
            srb_plus = State{Cplx(0.0, p.g * b_sum / p.kappa),
                             Cplx(-0.5 * b_sum, -im_beta), gamma};
            srb_minus = State{Cplx(0.0, -p.g * b_sum / p.kappa),
                              Cplx(0.5 * b_sum, im_beta), gamma};
        }
    }
    add(AttractorLabel::SrbPlus, srb_plus, srb_exists, false);
    add(AttractorLabel::SrbMinus, srb_minus, srb_exists, false);

    FixedPoint lc;
    lc.label = AttractorLabel::LimitCycle;
    lc.exists = p.u >= 2.0 * p.omega;
    lc.state = State{0.0, 0.0, lc.exists ? -p.omega / p.u : 0.0};
    set.push_back(lc);
    return set;
}

// --------------------------- attractor classification ----------------------

struct ClassifyOptions {
    double transient = 200.0;      // us
    double window = 500.0;         // us
    int window_samples = 2000;
    double ode_tol = 1e-10;
    double var_tol = 1e-10;        // trailing-window variance for a settled point
    double fp_dist = 1e-4;         // matching distance once settled
    double amp_tol = 1e-3;         // |alpha| oscillation amplitude of a cycle
    double ratio_tol = 0.02;       // stationarity of mean |alpha|^2 across half-windows
    double autocorr_min = 0.8;     // period stability
    double drift_tol = 1e-8;       // minimum |d gamma| between half-windows
    double snap_dist = 0.02;       // "already near a stable fixed point"
    int max_extensions = 3;        // transient doublings before giving up
};

struct Classification {
    AttractorLabel label = AttractorLabel::Unresolved;
    State final_state;
    double variance = 0.0;
    double amplitude = 0.0;
    double gamma_drift = 0.0;
    double matched_distance = -1.0;
};

namespace detail {

inline double distance(const PackedState& a, const PackedState& b) {
    return (a - b).norm();
}

inline double fp_distance(const PackedState& v, const FixedPoint& fp) {
    const PackedState w = pack(fp.state);
    double d = distance(v, w);
    if (fp.z2_image_equivalent) {
        PackedState mirrored = w;
        mirrored[0] = -w[0];
        mirrored[1] = -w[1];
        mirrored[2] = -w[2];
        mirrored[3] = -w[3];
        d = std::min(d, distance(v, mirrored));
    }
    return d;
}

// first local maximum of the normalized autocorrelation at lag >= 2
inline double periodicity_score(const std::vector<double>& signal) {
    const std::size_t n = signal.size();
    if (n < 8) return 0.0;
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> x(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = signal[i] - mean;
        var += x[i] * x[i];
    }
    if (var <= 0.0) return 0.0;
    double prev = 1.0, best = 0.0;
    bool descending = false;
    for (std::size_t lag = 1; lag < n / 2; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) acc += x[i] * x[i + lag];
        const double corr = acc / var;
        if (corr < prev) descending = true;
        else if (descending) best = std::max(best, corr);
        prev = corr;
    }
    return best;
}

}  // namespace detail

inline Classification classify_attractor(const ModelParams& p, const State& s0,
                                         const ClassifyOptions& opts = {}) {
    if (!s0.physical())
        throw std::invalid_argument("classify_attractor: unphysical initial condition");
    const FixedPointSet fps = fixed_points(p);
    auto f = [&p](double, const PackedState& y) { return rhs_packed(p, y); };

    PackedState v = pack(s0);
    Dopri5<PackedState> stepper(opts.ode_tol);
    double transient = opts.transient;
    Classification out;

    for (int round = 0; round <= opts.max_extensions; ++round) {
        stepper.advance(f, v, 0.0, transient);

        const int m = opts.window_samples;
        const double dt = opts.window / m;
        std::vector<PackedState> samples;
        samples.reserve(m + 1);
        std::vector<double> alpha_abs;
        alpha_abs.reserve(m + 1);
        samples.push_back(v);
        alpha_abs.push_back(std::hypot(v[0], v[1]));
        for (int k = 1; k <= m; ++k) {
            stepper.advance(f, v, (k - 1) * dt, k * dt);
            samples.push_back(v);
            alpha_abs.push_back(std::hypot(v[0], v[1]));
        }
        out.final_state = unpack(v);

        PackedState mean = PackedState::Zero();
        for (const auto& s : samples) mean += s;
        mean /= static_cast<double>(samples.size());
        double var = 0.0;
        for (const auto& s : samples) var += (s - mean).squaredNorm();
        var /= static_cast<double>(samples.size());
        out.variance = var;

        double amin = alpha_abs[0], amax = alpha_abs[0];
        for (double a : alpha_abs) {
            amin = std::min(amin, a);
            amax = std::max(amax, a);
        }
        out.amplitude = 0.5 * (amax - amin);

        const std::size_t half = samples.size() / 2;
        double a2_first = 0.0, a2_second = 0.0, g_first = 0.0, g_second = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            a2_first += alpha_abs[i] * alpha_abs[i];
            g_first += samples[i][4];
        }
        for (std::size_t i = half; i < samples.size(); ++i) {
            a2_second += alpha_abs[i] * alpha_abs[i];
            g_second += samples[i][4];
        }
        a2_first /= static_cast<double>(half);
        a2_second /= static_cast<double>(samples.size() - half);
        g_first /= static_cast<double>(half);
        g_second /= static_cast<double>(samples.size() - half);
        out.gamma_drift = g_second - g_first;

        // settled on a fixed point
        if (var < opts.var_tol) {
            double best = -1.0;
            for (const auto& fp : fps) {
                if (!fp.exists || fp.label == AttractorLabel::LimitCycle) continue;
                const double d = detail::fp_distance(mean, fp);
                if (best < 0.0 || d < best) {
                    best = d;
                    out.matched_distance = d;
                    out.label = fp.label;
                }
            }
            if (best >= 0.0 && best < opts.fp_dist) return out;
            out.label = AttractorLabel::Unresolved;
            return out;
        }

        // sustained oscillation with a stationary envelope and a stable period
        const double ratio = a2_second / std::max(a2_first, 1e-300);
        if (out.amplitude > opts.amp_tol && std::abs(ratio - 1.0) < opts.ratio_tol &&
            detail::periodicity_score(alpha_abs) > opts.autocorr_min) {
            out.label = AttractorLabel::LimitCycle;
            return out;
        }

        // asymptotic tendency: already beside a stable fixed point and not leaving it
        double best = -1.0;
        const FixedPoint* nearest = nullptr;
        for (const auto& fp : fps) {
            if (!fp.exists || fp.label == AttractorLabel::LimitCycle) continue;
            const double d = detail::fp_distance(mean, fp);
            if (best < 0.0 || d < best) {
                best = d;
                nearest = &fp;
            }
        }
        if (nearest && best < opts.snap_dist && nearest->stable.value_or(false) &&
            ratio <= 1.0 + opts.ratio_tol) {
            out.label = nearest->label;
            out.matched_distance = best;
            return out;
        }

        // slow drift of the mean inversion: label by the next stable fixed point in
        // the drift direction; with no stable fixed points the U >= 2w region drifts
        // onto the limit cycle
        if (std::abs(out.gamma_drift) > opts.drift_tol && ratio < 1.0 + opts.ratio_tol) {
            const double dir = out.gamma_drift > 0.0 ? 1.0 : -1.0;
            const FixedPoint* target = nullptr;
            double target_gap = 0.0;
            for (const auto& fp : fps) {
                if (!fp.exists || fp.label == AttractorLabel::LimitCycle) continue;
                if (!fp.stable.value_or(false)) continue;
                const double gap = dir * (fp.state.gamma - g_second);
                if (gap < -1e-6) continue;
                if (!target || gap < target_gap) {
                    target = &fp;
                    target_gap = gap;
                }
            }
            if (target) {
                out.label = target->label;
                return out;
            }
            if (p.u >= 2.0 * p.omega) {
                out.label = AttractorLabel::LimitCycle;
                return out;
            }
        }

        transient = opts.transient * std::pow(2.0, round + 1);
    }
    out.label = AttractorLabel::Unresolved;
    return out;
}

// Deterministic seed family: two pole-adjacent states plus a golden-angle spiral
// over the inversion range, all on the maximal spin sphere with a small cavity
// displacement.
inline std::vector<State> classification_seeds(int n_seeds) {
    if (n_seeds < 4) throw std::invalid_argument("classification_seeds: need >= 4 seeds");
    std::vector<State> seeds;
    const double eps = 1e-2;
    seeds.push_back(State{eps, eps, -std::sqrt(0.25 - eps * eps)});
    seeds.push_back(State{eps, eps, +std::sqrt(0.25 - eps * eps)});
    const double golden = 0.5 * (1.0 + std::sqrt(5.0));
    for (int k = 0; k + 2 < n_seeds; ++k) {
        const double gamma = -0.5 + (k + 0.5) / (n_seeds - 2);
        const double phase = 2.0 * std::numbers::pi * std::fmod(k * golden, 1.0);
        const double b = std::sqrt(std::max(0.25 - gamma * gamma, 0.0));
        seeds.push_back(State{eps * std::exp(kI * phase), b * std::exp(kI * phase), gamma});
    }
    return seeds;
}

struct PhaseDiagramCell {
    double g = 0.0;
    double u = 0.0;
    std::vector<AttractorLabel> labels;  // sorted, unique
};

inline PhaseDiagramCell classify_cell(ModelParams p, double g, double u, int n_seeds,
                                      const ClassifyOptions& opts = {}) {
    p.g = g;
    p.u = u;
    PhaseDiagramCell cell{g, u, {}};
    for (const State& s0 : classification_seeds(n_seeds)) {
        const auto c = classify_attractor(p, s0, opts);
        cell.labels.push_back(c.label);
    }
    std::sort(cell.labels.begin(), cell.labels.end());
    cell.labels.erase(std::unique(cell.labels.begin(), cell.labels.end()),
                      cell.labels.end());
    return cell;
}

}  // namespace dicke::semiclassical
