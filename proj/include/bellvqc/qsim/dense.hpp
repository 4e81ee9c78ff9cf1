#pragma once

#include <Eigen/Dense>

#include "bellvqc/qsim/pauli_sum.hpp"

namespace bellvqc::qsim {

using DenseMatrix = Eigen::MatrixXcd;

/// Dense forms are only built for small registers.
inline constexpr std::size_t max_dense_qubits = 12;

[[nodiscard]] inline DenseMatrix pauli_matrix(char p) {
    DenseMatrix m(2, 2);
    switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw InvalidArgument(std::string("invalid Pauli letter '") + p + "'");
    }
    return m;
}

/// Kronecker product a (x) b, with b acting on the less significant bits.
[[nodiscard]] inline DenseMatrix kron(const DenseMatrix &a, const DenseMatrix &b) {
    DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Tensor product of per-qubit 2x2 factors; factors[q] acts on qubit q.
[[nodiscard]] inline DenseMatrix tensor_product(const std::vector<DenseMatrix> &factors) {
    DenseMatrix out = DenseMatrix::Identity(1, 1);
    for (const auto &f : factors) out = kron(f, out);
    return out;
}

/// Dense matrix of a Pauli sum built from explicit Kronecker products. Kept
/// independent of the bitmask kernels so it can serve as their oracle.
[[nodiscard]] inline DenseMatrix dense_matrix(const PauliSum &h) {
    const auto n = h.num_qubits();
    if (n > max_dense_qubits) throw CapacityError("dense matrix limited to 12 qubits");
    const Eigen::Index dim = Eigen::Index{1} << n;
    DenseMatrix out = DenseMatrix::Zero(dim, dim);
    const PauliSum merged = h.simplified();
    for (const auto &t : merged.terms()) {
        std::vector<DenseMatrix> f;
        f.reserve(n);
        for (char c : t.ops) f.push_back(pauli_matrix(c));
        out += t.coeff * tensor_product(f);
    }
    return out;
}

/// Smallest eigenvalue of a dense Hermitian matrix.
[[nodiscard]] inline double min_eigenvalue(const DenseMatrix &m) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
    return es.eigenvalues()(0);
}

[[nodiscard]] inline double ground_energy_dense(const PauliSum &h) {
    return min_eigenvalue(dense_matrix(h));
}

} // namespace bellvqc::qsim
