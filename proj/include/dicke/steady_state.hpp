// steady_state.hpp — Steady states by shifted inverse power iteration, dense null-space oracle

#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <chrono>
#include <optional>
#include <random>

#include "dicke/types.hpp"

namespace dicke {

struct SolverOptions {
    double tol = 1e-6;    // absolute residual ||L vec(rho)||_inf
    int max_iter = 200;
    double shift = 1e-10;  // relative to the max-row-sum norm of L
    std::optional<DensityMatrix> seed_state;
    // Iteration is accepted only once the state has settled (relative change per
    // iteration below this), not merely when the residual test passes; slow modes
    // with |eigenvalue| < tol are otherwise invisible to the residual.
    double settle_tol = 1e-9;
    // When the contraction per iteration is too weak the shift sits above the
    // spectral gap; it is reduced by shift_backoff and the matrix re-factorized.
    double shift_backoff = 1e-6;
    int max_shift_reductions = 3;
    bool detect_degeneracy = true;
    // cooperative per-point timeout, checked between iterations
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct SteadyStateResult {
    DensityMatrix rho;
    int iterations = 0;
    double residual = 0.0;
    double shift_used = 0.0;
    bool degenerate_nullspace = false;
};

struct CutoffReport {
    double top_population = 0.0;  // P(n_max) from the reduced cavity state
    int n_max = 0;
    bool pass = false;
};

namespace detail {

inline double max_row_sum_norm(const SparseMatrix& m) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            sums[it.row()] += std::abs(it.value());
    return sums.maxCoeff();
}

inline double residual_inf(const SparseMatrix& l, const DenseVector& x) {
    return (l * x).cwiseAbs().maxCoeff();
}

// Runs the iteration from a given seed on an existing factorization.
// Returns the (trace-normalized) vector and whether it settled.
struct IterationOutcome {
    DenseVector x;
    int iterations = 0;
    double residual = 0.0;
    bool settled = false;
    bool stalled = false;
};

template <class Factorization>
IterationOutcome iterate_inverse_power(const SparseMatrix& l, const Factorization& lu,
                                       DenseVector x, int dim, const SolverOptions& opts,
                                       int max_iter) {
    IterationOutcome out;
    double prev_delta = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline)
            throw PointTimeoutError("solve_inverse_power: per-point timeout exceeded");
        DenseVector next = lu.solve(x);
        const Cplx tr = trace_of_vec(next, dim);
        if (std::abs(tr) > 1e-300)
            next /= tr;
        else
            next /= next.cwiseAbs().maxCoeff();
        const double delta =
            (next - x).cwiseAbs().maxCoeff() / std::max(next.cwiseAbs().maxCoeff(), 1e-300);
        x = std::move(next);
        out.iterations = it + 1;
        out.residual = residual_inf(l, x);
        if (out.residual < opts.tol && delta < opts.settle_tol) {
            out.settled = true;
            break;
        }
        // Weak contraction over consecutive iterations: the shift is not well
        // below the spectral gap and further sweeps cannot purge slow modes.
        if (prev_delta >= 0.0 && it >= 4 && delta > 0.2 * prev_delta &&
            delta > opts.settle_tol) {
            out.stalled = true;
            break;
        }
        prev_delta = delta;
    }
    out.x = std::move(x);
    return out;
}

inline DensityMatrix finalize_state(const DenseVector& x, HilbertDims dims) {
    DenseMatrix rho = unvec(x, dims.joint_dim());
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix{dims, std::move(rho)};
}

inline DenseVector random_hermitian_seed(int dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    DenseMatrix m(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) m(i, j) = Cplx(gauss(rng), gauss(rng));
    DenseMatrix rho = m * m.adjoint();
    rho /= rho.trace().real();
    return vec(rho);
}

inline double trace_distance(const DenseMatrix& a, const DenseMatrix& b) {
    const DenseMatrix diff = a - b;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (diff + diff.adjoint()));
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace detail

// Inverse power iteration on (L - sigma I) with a sparse LU factorization reused
// across sweeps of back-substitution; the shift is reduced adaptively when the
// contraction reveals it is not small compared to the spectral gap.
inline SteadyStateResult solve_inverse_power(const SparseMatrix& l, HilbertDims dims,
                                             const SolverOptions& opts = {}) {
    const int dim = dims.joint_dim();
    if (l.rows() != l.cols() ||
        l.rows() != static_cast<Eigen::Index>(dim) * dim)
        throw std::invalid_argument("solve_inverse_power: L must be D^2 x D^2");
    if (opts.tol <= 0 || opts.max_iter < 1 || opts.shift <= 0)
        throw std::invalid_argument("solve_inverse_power: invalid options");

    DenseVector x0 = opts.seed_state
                         ? vec(opts.seed_state->rho)
                         : vec(DenseMatrix::Identity(dim, dim) / static_cast<double>(dim));

    const double norm = detail::max_row_sum_norm(l);
    double sigma = opts.shift * norm;

    SparseMatrix identity(l.rows(), l.cols());
    identity.setIdentity();

    SteadyStateResult result;
    detail::IterationOutcome main;
    int total_iterations = 0;
    for (int attempt = 0; attempt <= opts.max_shift_reductions; ++attempt) {
        SparseMatrix shifted = l - sigma * identity;
        Eigen::SparseLU<SparseMatrix> lu;
        lu.compute(shifted);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("solve_inverse_power: sparse factorization failed");

        main = detail::iterate_inverse_power(l, lu, x0, dim, opts,
                                             opts.max_iter - total_iterations);
        total_iterations += main.iterations;
        if (main.settled) {
            result.shift_used = sigma;
            if (opts.detect_degeneracy) {
                auto probe = detail::iterate_inverse_power(
                    l, lu, detail::random_hermitian_seed(dim, 0x9e3779b9u), dim, opts,
                    opts.max_iter);
                if (probe.settled) {
                    const double dist =
                        detail::trace_distance(detail::finalize_state(main.x, dims).rho,
                                               detail::finalize_state(probe.x, dims).rho);
                    result.degenerate_nullspace = dist > 100.0 * opts.tol;
                }
            }
            break;
        }
        if (!main.stalled || total_iterations >= opts.max_iter)
            throw NonConvergenceError(main.residual, total_iterations);
        x0 = main.x;  // keep progress, retry with a smaller shift
        sigma *= opts.shift_backoff;
    }
    if (!main.settled) throw NonConvergenceError(main.residual, total_iterations);

    result.rho = detail::finalize_state(main.x, dims);
    result.iterations = total_iterations;
    result.residual = detail::residual_inf(l, vec(result.rho.rho));
    if (result.residual >= opts.tol)
        throw NonConvergenceError(result.residual, total_iterations);
    return result;
}

// Dense validation oracle: eigenvector of the smallest-magnitude eigenvalue.
inline DensityMatrix solve_dense_nullspace(const SparseMatrix& l, HilbertDims dims,
                                           int dense_limit = 64) {
    const int dim = dims.joint_dim();
    if (dim > dense_limit)
        throw std::invalid_argument("solve_dense_nullspace: dimension over dense limit");
    if (l.rows() != static_cast<Eigen::Index>(dim) * dim || l.rows() != l.cols())
        throw std::invalid_argument("solve_dense_nullspace: L must be D^2 x D^2");

    Eigen::ComplexEigenSolver<DenseMatrix> es(DenseMatrix(l), true);
    const auto& vals = es.eigenvalues();
    Eigen::Index best = 0, second = -1;
    for (Eigen::Index k = 1; k < vals.size(); ++k) {
        if (std::abs(vals[k]) < std::abs(vals[best])) {
            second = best;
            best = k;
        } else if (second < 0 || std::abs(vals[k]) < std::abs(vals[second])) {
            second = k;
        }
    }
    if (std::abs(vals[best]) >= 1e-8)
        throw std::runtime_error("solve_dense_nullspace: no eigenvalue within 1e-8 of zero");
    if (second >= 0 && std::abs(vals[second]) < 1e-8)
        throw DegenerateNullSpaceError("solve_dense_nullspace: null space is degenerate");

    return detail::finalize_state(es.eigenvectors().col(best), dims);
}

// Population of the highest retained Fock level; guards the truncation.
inline CutoffReport check_cutoff(const DensityMatrix& state) {
    const HilbertDims dims = state.dims;
    double p_top = 0.0;
    for (int s = 0; s < dims.spin_dim(); ++s)
        p_top += state.rho(dims.index(dims.n_max, s), dims.index(dims.n_max, s)).real();
    return CutoffReport{p_top, dims.n_max, p_top < 1e-6};
}

}  // namespace dicke
