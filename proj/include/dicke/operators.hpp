// operators.hpp — Cavity/collective-spin operators, Kronecker products, superoperators

#pragma once

#include <cmath>
#include <vector>

#include "dicke/types.hpp"

namespace dicke {

using Triplet = Eigen::Triplet<Cplx>;

inline SparseMatrix sparse_from_triplets(int rows, int cols, std::vector<Triplet>& trips) {
    SparseMatrix m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.prune([](int, int, const Cplx& v) { return v != Cplx(0.0, 0.0); });
    m.makeCompressed();
    return m;
}

inline SparseMatrix sparse_identity(int dim) {
    SparseMatrix m(dim, dim);
    m.setIdentity();
    return m;
}

struct CavityOps {
    SparseMatrix a;      // a|n> = sqrt(n) |n-1>
    SparseMatrix a_dag;  // conjugate transpose of a
    SparseMatrix n;      // a_dag a, diagonal 0..n_max
};

inline CavityOps build_cavity_ops(int n_max) {
    if (n_max < 0) throw std::invalid_argument("build_cavity_ops: n_max must be >= 0");
    const int d = n_max + 1;
    std::vector<Triplet> ta, tn;
    for (int n = 1; n < d; ++n) ta.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    for (int n = 0; n < d; ++n) tn.emplace_back(n, n, static_cast<double>(n));
    CavityOps ops;
    ops.a = sparse_from_triplets(d, d, ta);
    ops.a_dag = ops.a.adjoint();
    ops.n = sparse_from_triplets(d, d, tn);
    return ops;
}

struct SpinOps {
    SparseMatrix jz;  // diagonal n - N/2
    SparseMatrix jp;  // Jp|n> = sqrt((N-n)(n+1)) |n+1>
    SparseMatrix jm;  // Jp^dagger
};

inline SpinOps build_spin_ops(int n_atoms) {
    if (n_atoms < 1) throw std::invalid_argument("build_spin_ops: N must be >= 1");
    const int d = n_atoms + 1;
    std::vector<Triplet> tz, tp;
    for (int n = 0; n < d; ++n) tz.emplace_back(n, n, n - n_atoms / 2.0);
    for (int n = 0; n + 1 < d; ++n)
        tp.emplace_back(n + 1, n, std::sqrt(static_cast<double>(n_atoms - n) * (n + 1)));
    SpinOps ops;
    ops.jz = sparse_from_triplets(d, d, tz);
    ops.jp = sparse_from_triplets(d, d, tp);
    ops.jm = ops.jp.adjoint();
    return ops;
}

// Kronecker product with (cavity, spin) ordering: joint index i_a * cols(B) + i_b.
inline SparseMatrix tensor(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
                    trips.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                                       static_cast<int>(ia.col() * b.cols() + ib.col()),
                                       ia.value() * ib.value());
                }
            }
        }
    }
    return sparse_from_triplets(static_cast<int>(a.rows() * b.rows()),
                                static_cast<int>(a.cols() * b.cols()), trips);
}

// Superoperator M with M vec(rho) = vec(left rho right) under column stacking,
// i.e. M = right^T (x) left.
inline SparseMatrix superop(const SparseMatrix& left, const SparseMatrix& right) {
    if (left.rows() != left.cols() || right.rows() != right.cols() ||
        left.rows() != right.rows())
        throw std::invalid_argument("superop: operands must be square with equal dims");
    return tensor(SparseMatrix(right.transpose()), left);
}

inline SparseMatrix superop_left(const SparseMatrix& op) {
    return superop(op, sparse_identity(static_cast<int>(op.rows())));
}

inline SparseMatrix superop_right(const SparseMatrix& op) {
    return superop(sparse_identity(static_cast<int>(op.rows())), op);
}

}  // namespace dicke
