// dynamics.hpp — Master-equation evolution, regression correlations, power spectra

#pragma once

#include <fftw3.h>

#include <span>
#include <vector>

#include "dicke/integrator.hpp"
#include "dicke/model.hpp"
#include "dicke/observables.hpp"
#include "dicke/types.hpp"

namespace dicke {

struct TimeSeries {
    std::vector<double> t;  // uniform grid, t[k+1]-t[k] = dt
    std::vector<Cplx> values;
    double dt = 0.0;
};

struct Spectrum {
    std::vector<double> nu;  // angular frequencies, ascending
    std::vector<double> values;
};

struct EvolveOptions {
    double tol = 1e-10;  // local error per unit time
};

namespace detail {

inline void check_grid(std::span<const double> t_grid) {
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw std::invalid_argument("time grid must be ascending from 0");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (t_grid[k] <= t_grid[k - 1])
            throw std::invalid_argument("time grid must be ascending from 0");
}

struct LiouvillianRhs {
    const SparseMatrix& l;
    DenseVector operator()(double, const DenseVector& x) const { return l * x; }
};

}  // namespace detail

// rho(t_k) ~ exp(L t_k) rho0 on the vectorized state.
inline std::vector<DensityMatrix> evolve(const SparseMatrix& l, const DensityMatrix& rho0,
                                         std::span<const double> t_grid,
                                         const EvolveOptions& opts = {}) {
    detail::check_grid(t_grid);
    const int dim = rho0.dim();
    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    out.push_back(rho0);

    DenseVector x = vec(rho0.rho);
    Dopri5<DenseVector> stepper(opts.tol);
    detail::LiouvillianRhs rhs{l};
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        stepper.advance(rhs, x, t_grid[k - 1], t_grid[k]);
        out.push_back(DensityMatrix{rho0.dims, unvec(x, dim)});
    }
    return out;
}

// C(t) = tr[a^dag Phi_t(a rho_ss)] - |tr(a rho_ss)|^2 via the quantum regression
// theorem: the operator seed a rho_ss is evolved by the same vectorized generator.
inline TimeSeries correlation(const SparseMatrix& l, const DensityMatrix& rho_ss,
                              std::span<const double> t_grid,
                              const EvolveOptions& opts = {}) {
    detail::check_grid(t_grid);
    const HilbertDims dims = rho_ss.dims;
    const JointOps ops = build_joint_ops(dims);
    const Cplx a_ss = expect(ops.a, rho_ss);
    const double coherent = std::norm(a_ss);

    DenseVector x = vec(DenseMatrix(ops.a * rho_ss.rho));
    Dopri5<DenseVector> stepper(opts.tol);
    detail::LiouvillianRhs rhs{l};

    TimeSeries series;
    series.t.assign(t_grid.begin(), t_grid.end());
    series.dt = t_grid.size() > 1 ? t_grid[1] - t_grid[0] : 0.0;
    series.values.reserve(t_grid.size());
    series.values.push_back(expect(ops.a_dag, unvec(x, dims.joint_dim())) - coherent);
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        stepper.advance(rhs, x, t_grid[k - 1], t_grid[k]);
        series.values.push_back(expect(ops.a_dag, unvec(x, dims.joint_dim())) - coherent);
    }
    return series;
}

struct CorrelationWindow {
    double dt = 0.01;            // us
    double max_t = 1000.0;       // us
    double decay_fraction = 1e-3;  // stop once |C| stays below this of |C(0)|
};

// Integrates C(t) until the correlations have decayed or max_t is reached.
inline TimeSeries correlation_until_decayed(const SparseMatrix& l,
                                            const DensityMatrix& rho_ss,
                                            const CorrelationWindow& window = {},
                                            const EvolveOptions& opts = {}) {
    const HilbertDims dims = rho_ss.dims;
    const JointOps ops = build_joint_ops(dims);
    const Cplx a_ss = expect(ops.a, rho_ss);
    const double coherent = std::norm(a_ss);

    DenseVector x = vec(DenseMatrix(ops.a * rho_ss.rho));
    Dopri5<DenseVector> stepper(opts.tol);
    detail::LiouvillianRhs rhs{l};

    TimeSeries series;
    series.dt = window.dt;
    series.t.push_back(0.0);
    series.values.push_back(expect(ops.a_dag, unvec(x, dims.joint_dim())) - coherent);
    const double c0 = std::abs(series.values.front());
    const double floor = window.decay_fraction * c0;
    // require the decay to hold over a trailing stretch, not a single zero crossing
    const std::size_t quiet_needed = std::max<std::size_t>(64, static_cast<std::size_t>(2.0 / window.dt));
    std::size_t quiet = 0;
    for (std::size_t k = 1; static_cast<double>(k) * window.dt <= window.max_t; ++k) {
        const double t_prev = series.t.back();
        const double t_now = static_cast<double>(k) * window.dt;
        stepper.advance(rhs, x, t_prev, t_now);
        series.t.push_back(t_now);
        series.values.push_back(expect(ops.a_dag, unvec(x, dims.joint_dim())) - coherent);
        quiet = std::abs(series.values.back()) < floor ? quiet + 1 : 0;
        if (c0 == 0.0 || quiet >= quiet_needed) break;
    }
    return series;
}

// One-sided discretization of S(nu) = int dt C(t) exp(-i nu t) for stationary C
// with C(-t) = conj(C(t)):
//   S(nu_k) = 2 Re[ sum_j w_j C_j exp(-i nu_k t_j) ] dt,  w_0 = 1/2.
// Output on the FFT grid nu_k = 2 pi k/(n dt), shifted to ascending order.
inline Spectrum power_spectrum(const TimeSeries& c) {
    const std::size_t n = c.values.size();
    if (n < 2 || c.dt <= 0.0)
        throw std::invalid_argument("power_spectrum: need a uniform series with dt > 0");
    Spectrum s;
    const double c0 = std::abs(c.values.front());
    double cmax = 0.0;
    for (const Cplx& v : c.values) cmax = std::max(cmax, std::abs(v));
    const double d_nu = 2.0 * std::numbers::pi / (static_cast<double>(n) * c.dt);
    if (cmax == 0.0) {
        for (std::size_t k = 0; k < n; ++k) {
            const long idx = static_cast<long>(k) - static_cast<long>(n / 2);
            s.nu.push_back(static_cast<double>(idx) * d_nu);
            s.values.push_back(0.0);
        }
        return s;
    }
    if (std::abs(c.values.back()) >= 1e-3 * c0)
        throw UndecayedCorrelationError(
            "power_spectrum: correlations have not decayed over the window");

    // forward DFT: X_k = sum_j C_j exp(-2 pi i j k / n), with the half-weighted j=0 term
    std::vector<Cplx> in(c.values.begin(), c.values.end());
    in[0] *= 0.5;
    std::vector<Cplx> out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n),
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    s.nu.reserve(n);
    s.values.reserve(n);
    // unshifted index k corresponds to nu = 2 pi k/(n dt) with aliasing beyond n/2
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = (k + (n - n / 2)) % n;  // fftshift
        const long idx = static_cast<long>(k) - static_cast<long>(n / 2);
        s.nu.push_back(static_cast<double>(idx) * d_nu);
        s.values.push_back(2.0 * out[src].real() * c.dt);
    }
    return s;
}

}  // namespace dicke
