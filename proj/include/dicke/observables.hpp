// observables.hpp — Expectation values, reduced states, phase-space functions, entanglement

#pragma once

#include <Eigen/Eigenvalues>

#include <numbers>
#include <vector>

#include "dicke/operators.hpp"
#include "dicke/types.hpp"

namespace dicke {

inline Cplx expect(const SparseMatrix& op, const DenseMatrix& rho) {
    if (op.rows() != rho.rows() || op.cols() != rho.cols())
        throw std::invalid_argument("expect: dimension mismatch");
    Cplx sum = 0.0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op, k); it; ++it)
            sum += it.value() * rho(it.col(), it.row());
    return sum;
}

inline Cplx expect(const SparseMatrix& op, const DensityMatrix& state) {
    return expect(op, state.rho);
}

enum class Subsystem { Cavity, Spin };

inline DenseMatrix partial_trace(const DensityMatrix& state, Subsystem keep) {
    const HilbertDims d = state.dims;
    if (keep == Subsystem::Cavity) {
        DenseMatrix out = DenseMatrix::Zero(d.cavity_dim(), d.cavity_dim());
        for (int i = 0; i < d.cavity_dim(); ++i)
            for (int j = 0; j < d.cavity_dim(); ++j)
                for (int s = 0; s < d.spin_dim(); ++s)
                    out(i, j) += state.rho(d.index(i, s), d.index(j, s));
        return out;
    }
    DenseMatrix out = DenseMatrix::Zero(d.spin_dim(), d.spin_dim());
    for (int s = 0; s < d.spin_dim(); ++s)
        for (int t = 0; t < d.spin_dim(); ++t)
            for (int i = 0; i < d.cavity_dim(); ++i)
                out(s, t) += state.rho(d.index(i, s), d.index(i, t));
    return out;
}

// g2(0) = <adag adag a a> / <adag a>^2 on the joint state.
inline double g2_zero(const DensityMatrix& state) {
    const HilbertDims d = state.dims;
    const CavityOps cav = build_cavity_ops(d.n_max);
    const DenseMatrix rho_cav = partial_trace(state, Subsystem::Cavity);
    const double n = expect(cav.n, rho_cav).real();
    if (n <= 1e-12) throw VacuumFieldError("g2_zero: <adag a> underflow");
    const SparseMatrix a2 = SparseMatrix(cav.a * cav.a);
    const double numer = expect(SparseMatrix(a2.adjoint() * a2), rho_cav).real();
    return numer / (n * n);
}

inline double purity(const DenseMatrix& rho) { return (rho * rho).trace().real(); }
inline double purity(const DensityMatrix& state) { return purity(state.rho); }

// Uhlmann fidelity F = tr sqrt(sqrt(rho) sigma sqrt(rho)); pure sigma takes the
// overlap fast path.
inline double fidelity(const DenseMatrix& rho, const DenseMatrix& sigma) {
    if (rho.rows() != sigma.rows())
        throw std::invalid_argument("fidelity: dimension mismatch");
    if (purity(sigma) > 1.0 - 1e-10) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(sigma);
        const DenseVector psi = es.eigenvectors().col(es.eigenvalues().size() - 1);
        const double overlap = std::max((psi.adjoint() * rho * psi)(0, 0).real(), 0.0);
        return std::sqrt(overlap);
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho);
    DenseVector vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const DenseMatrix sqrt_rho =
        es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es2(sqrt_rho * sigma * sqrt_rho);
    return es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    return fidelity(a.rho, b.rho);
}

// Partial transpose over one factor; the trace norm is the same either way.
inline DenseMatrix partial_transpose(const DensityMatrix& state, Subsystem over) {
    const HilbertDims d = state.dims;
    DenseMatrix out(d.joint_dim(), d.joint_dim());
    for (int i = 0; i < d.cavity_dim(); ++i)
        for (int s = 0; s < d.spin_dim(); ++s)
            for (int j = 0; j < d.cavity_dim(); ++j)
                for (int t = 0; t < d.spin_dim(); ++t) {
                    if (over == Subsystem::Cavity)
                        out(d.index(i, s), d.index(j, t)) = state.rho(d.index(j, s), d.index(i, t));
                    else
                        out(d.index(i, s), d.index(j, t)) = state.rho(d.index(i, t), d.index(j, s));
                }
    return out;
}

// E_N = log2 || rho^{Gamma} ||_1; the partial transpose is Hermitian, so the
// trace norm is the sum of |eigenvalues|.
inline double log_negativity(const DensityMatrix& state,
                             Subsystem over = Subsystem::Cavity) {
    const DenseMatrix pt = partial_transpose(state, over);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(pt, Eigen::EigenvaluesOnly);
    const double trace_norm = es.eigenvalues().cwiseAbs().sum();
    return std::log2(trace_norm);
}

// --------------------------- phase-space functions --------------------------

struct WignerGrid {
    std::vector<double> x, y;        // alpha = (x + i y)/sqrt(2)
    Eigen::MatrixXd values;          // values(ix, iy) = W(alpha(x_ix, y_iy))
};

struct SpinQGrid {
    std::vector<double> theta, phi;  // eta = exp(i phi) tan(theta/2)
    Eigen::MatrixXd values;          // values(itheta, iphi)
};

// W(alpha) = (2/pi) tr[D^dag(alpha) rho_cav D(alpha) (-1)^n], the displacement
// built by exponentiating the truncated generator (exactly unitary).
inline double wigner_at(const DenseMatrix& rho_cav, Cplx alpha) {
    const int m = static_cast<int>(rho_cav.rows());
    DenseMatrix k = DenseMatrix::Zero(m, m);
    for (int n = 1; n < m; ++n) {
        const double s = std::sqrt(static_cast<double>(n));
        k(n, n - 1) = alpha * s;        // alpha a_dag
        k(n - 1, n) = -std::conj(alpha) * s;  // -conj(alpha) a
    }
    // k is anti-Hermitian: diagonalize i k (Hermitian), D = exp(k) = V e^{-i w} V^dag
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(kI * k);
    DenseVector phase(m);
    for (int n = 0; n < m; ++n) phase[n] = std::exp(-kI * es.eigenvalues()[n]);
    const DenseMatrix disp = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    // sum_n (-1)^n <n| D^dag rho D |n>
    Cplx val = 0.0;
    for (int n = 0; n < m; ++n) {
        const Cplx term = disp.col(n).adjoint() * rho_cav * disp.col(n);
        val += (n % 2 == 0 ? 1.0 : -1.0) * term;
    }
    return (2.0 / std::numbers::pi) * val.real();
}

inline WignerGrid wigner(const DenseMatrix& rho_cav, std::vector<double> xs,
                         std::vector<double> ys) {
    WignerGrid grid;
    grid.values.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
            grid.values(i, j) = wigner_at(rho_cav, Cplx(xs[i], ys[j]) * inv_sqrt2);
    grid.x = std::move(xs);
    grid.y = std::move(ys);
    return grid;
}

// Spin coherent state |eta> on the symmetric sector, in the half-angle form
// c_n = sqrt(C(N,n)) cos^{N-n}(theta/2) sin^n(theta/2) e^{i n phi}, which is
// stable at both poles. n = 0 is the Jz = -N/2 state, so theta = 0 is the
// normal (down) pole in this convention.
inline DenseVector spin_coherent_state(int n_atoms, double theta, double phi) {
    DenseVector c(n_atoms + 1);
    const double ch = std::cos(0.5 * theta);
    const double sh = std::sin(0.5 * theta);
    double log_binom = 0.0;  // log C(N, n), updated recursively
    for (int n = 0; n <= n_atoms; ++n) {
        if (n > 0) log_binom += std::log(static_cast<double>(n_atoms - n + 1) / n);
        const double mag = std::exp(0.5 * log_binom) * std::pow(ch, n_atoms - n) *
                           std::pow(sh, n);
        c[n] = mag * std::exp(kI * (phi * n));
    }
    return c;
}

// Q(theta, phi) = <eta| rho_spin |eta>
inline SpinQGrid spin_qfunction(const DenseMatrix& rho_spin, std::vector<double> thetas,
                                std::vector<double> phis) {
    const int n_atoms = static_cast<int>(rho_spin.rows()) - 1;
    SpinQGrid grid;
    grid.values.resize(static_cast<Eigen::Index>(thetas.size()),
                       static_cast<Eigen::Index>(phis.size()));
    for (std::size_t i = 0; i < thetas.size(); ++i)
        for (std::size_t j = 0; j < phis.size(); ++j) {
            const DenseVector eta = spin_coherent_state(n_atoms, thetas[i], phis[j]);
            grid.values(i, j) = std::max((eta.adjoint() * rho_spin * eta)(0, 0).real(), 0.0);
        }
    grid.theta = std::move(thetas);
    grid.phi = std::move(phis);
    return grid;
}

}  // namespace dicke
