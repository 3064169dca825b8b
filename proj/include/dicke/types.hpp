// types.hpp — Core scalar/matrix aliases, Hilbert-space bookkeeping, density matrices

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <stdexcept>
#include <string>

namespace dicke {

using Cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Cplx>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

inline constexpr Cplx kI{0.0, 1.0};

// Dimensions of the truncated joint space, cavity factor first.
// The spin space is the single symmetric sector j = N/2 with basis
// |n, N/2>, n = 0..N, ordered by excitation number (Jz eigenvalue n - N/2).
struct HilbertDims {
    int n_max = 0;  // highest retained Fock level
    int n_atoms = 0;

    int cavity_dim() const { return n_max + 1; }
    int spin_dim() const { return n_atoms + 1; }
    int joint_dim() const { return cavity_dim() * spin_dim(); }

    // joint basis index of |n_cavity> (x) |n_spin>
    int index(int n_cavity, int n_spin) const {
        return n_cavity * spin_dim() + n_spin;
    }

    bool operator==(const HilbertDims&) const = default;
};

struct DensityMatrix {
    HilbertDims dims;
    DenseMatrix rho;

    int dim() const { return static_cast<int>(rho.rows()); }
};

struct NonConvergenceError : std::runtime_error {
    double residual;
    int iterations;
    NonConvergenceError(double res, int iters)
        : std::runtime_error("steady state solver did not converge: residual " +
                             std::to_string(res) + " after " + std::to_string(iters) +
                             " iterations"),
          residual(res),
          iterations(iters) {}
};

struct DegenerateNullSpaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndecayedCorrelationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VacuumFieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepUnderflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PointTimeoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Vectorization convention used everywhere: column stacking,
//   vec(rho)[i + D*j] = rho(i, j),
// so that vec(A rho B) = (B^T (x) A) vec(rho).
inline DenseVector vec(const DenseMatrix& m) {
    return Eigen::Map<const DenseVector>(m.data(), m.size());
}

inline DenseMatrix unvec(const DenseVector& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim)
        throw std::invalid_argument("unvec: size is not dim^2");
    return Eigen::Map<const DenseMatrix>(v.data(), dim, dim);
}

inline Cplx trace_of_vec(const DenseVector& v, int dim) {
    Cplx tr = 0.0;
    for (int i = 0; i < dim; ++i) tr += v[i + static_cast<Eigen::Index>(dim) * i];
    return tr;
}

}  // namespace dicke
