// model.hpp — Generalized Dicke Hamiltonian and vectorized Liouvillian

#pragma once

#include <numbers>
#include <optional>

#include "dicke/operators.hpp"
#include "dicke/types.hpp"

namespace dicke {

// All frequencies are angular, in rad/us; times in us. User-facing inputs are
// plain frequencies nu in MHz (the omega/(2pi) convention), converted via 2*pi.
struct ModelParams {
    double omega0 = 0.0;  // atomic frequency
    double omega = 0.0;   // cavity frequency
    double kappa = 0.0;   // cavity amplitude decay rate (master equation uses 2*kappa*D[a])
    double g = 0.0;       // linear coupling
    double u = 0.0;       // non-linear coupling
    int n_atoms = 1;
    int n_max = 9;

    HilbertDims dims() const { return HilbertDims{n_max, n_atoms}; }

    void validate() const {
        if (omega <= 0) throw std::invalid_argument("ModelParams: omega must be > 0");
        if (omega0 < 0) throw std::invalid_argument("ModelParams: omega0 must be >= 0");
        if (kappa < 0) throw std::invalid_argument("ModelParams: kappa must be >= 0");
        if (g < 0) throw std::invalid_argument("ModelParams: g must be >= 0");
        if (n_atoms < 1) throw std::invalid_argument("ModelParams: N must be >= 1");
        if (n_max < 1) throw std::invalid_argument("ModelParams: n_max must be >= 1");
    }
};

inline ModelParams params_from_mhz(double nu0, double nu, double nu_kappa, double nu_g,
                                   double nu_u, int n_atoms, int n_max = 9) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ModelParams p;
    p.omega0 = two_pi * nu0;
    p.omega = two_pi * nu;
    p.kappa = two_pi * nu_kappa;
    p.g = two_pi * nu_g;
    p.u = two_pi * nu_u;
    p.n_atoms = n_atoms;
    p.n_max = n_max;
    p.validate();
    return p;
}

// Joint-space operators (cavity factor first).
struct JointOps {
    SparseMatrix a, a_dag, n_phot;
    SparseMatrix jz, jp, jm;
};

inline JointOps build_joint_ops(HilbertDims dims) {
    const CavityOps cav = build_cavity_ops(dims.n_max);
    const SpinOps spin = build_spin_ops(dims.n_atoms);
    const SparseMatrix ic = sparse_identity(dims.cavity_dim());
    const SparseMatrix is = sparse_identity(dims.spin_dim());
    JointOps ops;
    ops.a = tensor(cav.a, is);
    ops.a_dag = tensor(cav.a_dag, is);
    ops.n_phot = tensor(cav.n, is);
    ops.jz = tensor(ic, spin.jz);
    ops.jp = tensor(ic, spin.jp);
    ops.jm = tensor(ic, spin.jm);
    return ops;
}

// H = omega0 Jz + omega a^dag a + g/sqrt(N) (Jm + Jp)(a + a^dag) + U/N Jz a^dag a
inline SparseMatrix build_hamiltonian(const ModelParams& p, const JointOps& ops) {
    p.validate();
    const double root_n = std::sqrt(static_cast<double>(p.n_atoms));
    SparseMatrix h = p.omega0 * ops.jz + p.omega * ops.n_phot +
                     (p.g / root_n) * ((ops.jm + ops.jp) * (ops.a + ops.a_dag)) +
                     (p.u / p.n_atoms) * (ops.jz * ops.n_phot);
    h.prune([](int, int, const Cplx& v) { return v != Cplx(0.0, 0.0); });
    h.makeCompressed();
    return h;
}

inline SparseMatrix build_hamiltonian(const ModelParams& p) {
    return build_hamiltonian(p, build_joint_ops(p.dims()));
}

// Generator of rho_dot = -i[H, rho] + rate * (c rho c^dag - 1/2 {c^dag c, rho}),
// acting on column-stacked vec(rho).
inline SparseMatrix lindblad_generator(const SparseMatrix& h, const SparseMatrix& c,
                                       double rate) {
    const SparseMatrix c_dag = c.adjoint();
    const SparseMatrix cdc = c_dag * c;
    SparseMatrix l = -kI * (superop_left(h) - superop_right(h)) +
                     rate * (superop(c, c_dag) - 0.5 * superop_left(cdc) -
                             0.5 * superop_right(cdc));
    l.prune([](int, int, const Cplx& v) { return v != Cplx(0.0, 0.0); });
    l.makeCompressed();
    return l;
}

// L vec(rho) = vec(-i[H, rho] + 2 kappa (a rho a^dag - 1/2 {a^dag a, rho}))
inline SparseMatrix build_liouvillian(const ModelParams& p, const JointOps& ops) {
    return lindblad_generator(build_hamiltonian(p, ops), ops.a, 2.0 * p.kappa);
}

inline SparseMatrix build_liouvillian(const ModelParams& p) {
    return build_liouvillian(p, build_joint_ops(p.dims()));
}

// Pure product state |n_cavity> (x) |n_spin> as a density matrix.
inline DensityMatrix basis_state(HilbertDims dims, int n_cavity, int n_spin) {
    if (n_cavity < 0 || n_cavity > dims.n_max)
        throw std::out_of_range("basis_state: cavity index out of range");
    if (n_spin < 0 || n_spin > dims.n_atoms)
        throw std::out_of_range("basis_state: spin index out of range");
    DensityMatrix dm{dims, DenseMatrix::Zero(dims.joint_dim(), dims.joint_dim())};
    dm.rho(dims.index(n_cavity, n_spin), dims.index(n_cavity, n_spin)) = 1.0;
    return dm;
}

inline DensityMatrix maximally_mixed(HilbertDims dims) {
    const int d = dims.joint_dim();
    return DensityMatrix{dims, DenseMatrix::Identity(d, d) / static_cast<double>(d)};
}

// Diagonal part of H on basis state |n_cavity, n_spin> (the g-independent energy).
inline double diagonal_energy(const ModelParams& p, int n_cavity, int n_spin) {
    const double jz = n_spin - p.n_atoms / 2.0;
    return p.omega0 * jz + p.omega * n_cavity + (p.u / p.n_atoms) * jz * n_cavity;
}

// Value of U at which the diagonal energies of two basis states cross.
// E(U) is linear in U; returns nullopt for parallel levels (no crossing).
inline std::optional<double> diagonal_crossing_u(const ModelParams& p, int nc1, int ns1,
                                                 int nc2, int ns2) {
    const double jz1 = ns1 - p.n_atoms / 2.0;
    const double jz2 = ns2 - p.n_atoms / 2.0;
    const double slope = (jz1 * nc1 - jz2 * nc2) / p.n_atoms;
    const double offset =
        p.omega0 * (jz1 - jz2) + p.omega * (nc1 - nc2);
    if (slope == 0.0) return std::nullopt;
    return -offset / slope;
}

}  // namespace dicke
