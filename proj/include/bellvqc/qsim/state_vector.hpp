#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bellvqc/error.hpp"

namespace bellvqc::qsim {

using cplx = std::complex<double>;
using Mat2 = std::array<cplx, 4>; // row-major {m00, m01, m10, m11}

/// a * b without the NaN-recovery branch of std::complex multiplication.
[[nodiscard]] inline cplx mul(cplx a, cplx b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// Largest register the dense simulator will allocate (2^26 amplitudes = 1 GiB).
inline constexpr std::size_t max_qubits = 26;

/// Dense amplitude vector. Qubit q is bit q of the basis index (qubit 0 is the
/// least significant bit).
class StateVector {
public:
    explicit StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
        check_size(num_qubits);
        amps_.assign(std::size_t{1} << num_qubits, cplx{0.0, 0.0});
        amps_[0] = 1.0;
    }

    StateVector(std::size_t num_qubits, std::vector<cplx> amplitudes)
        : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
        check_size(num_qubits);
        if (amps_.size() != (std::size_t{1} << num_qubits)) {
            throw InvalidArgument("amplitude vector length must be 2^num_qubits");
        }
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }

    [[nodiscard]] std::span<const cplx> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] std::span<cplx> amplitudes() noexcept { return amps_; }

    [[nodiscard]] const cplx &operator[](std::size_t i) const { return amps_[i]; }
    [[nodiscard]] cplx &operator[](std::size_t i) { return amps_[i]; }

    [[nodiscard]] double norm() const {
        double s = 0.0;
        for (const auto &a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    void normalize() {
        const double n = norm();
        if (n == 0.0) throw NumericalError("cannot normalize the zero vector");
        for (auto &a : amps_) a /= n;
    }

    [[nodiscard]] std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
        return p;
    }

    // ---- kernels ---------------------------------------------------------

    void apply_1q(std::size_t q, const Mat2 &m) {
        check_qubit(q);
        const std::size_t stride = std::size_t{1} << q;
        const std::size_t n = amps_.size();
        for (std::size_t base = 0; base < n; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const cplx a0 = amps_[i];
                const cplx a1 = amps_[i + stride];
                amps_[i] = mul(m[0], a0) + mul(m[1], a1);
                amps_[i + stride] = mul(m[2], a0) + mul(m[3], a1);
            }
        }
    }

    /// diag(d0, d1) on qubit q; cheaper than the general kernel.
    void apply_diag_1q(std::size_t q, cplx d0, cplx d1) {
        check_qubit(q);
        const std::size_t mask = std::size_t{1} << q;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            amps_[i] = mul(amps_[i], (i & mask) ? d1 : d0);
        }
    }

    void apply_cz(std::size_t a, std::size_t b) {
        check_pair(a, b);
        const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & mask) == mask) amps_[i] = -amps_[i];
        }
    }

    void apply_cnot(std::size_t control, std::size_t target) {
        check_pair(control, target);
        const std::size_t cm = std::size_t{1} << control;
        const std::size_t tm = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
        }
    }

private:
    static void check_size(std::size_t n) {
        if (n < 1 || n > max_qubits) {
            throw CapacityError("qubit count " + std::to_string(n) +
                                " outside supported range [1, " +
                                std::to_string(max_qubits) + "]");
        }
    }

    void check_qubit(std::size_t q) const {
        if (q >= num_qubits_) {
            throw InvalidArgument("qubit index " + std::to_string(q) +
                                  " out of range for " +
                                  std::to_string(num_qubits_) + "-qubit state");
        }
    }

    void check_pair(std::size_t a, std::size_t b) const {
        check_qubit(a);
        check_qubit(b);
        if (a == b) throw InvalidArgument("two-qubit gate targets must be distinct");
    }

    std::size_t num_qubits_;
    std::vector<cplx> amps_;
};

[[nodiscard]] inline StateVector init_state(std::size_t n) { return StateVector(n); }

/// |<a|b>|.
[[nodiscard]] inline double overlap_abs(const StateVector &a, const StateVector &b) {
    if (a.dim() != b.dim()) throw InvalidArgument("overlap of states with different sizes");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return std::abs(s);
}

/// <C> for C = |0..0><1..1|, i.e. Tr(rho C) = conj(a_{0..0}) a_{1..1}.
[[nodiscard]] inline cplx antidiagonal_coherence(const StateVector &s) {
    return std::conj(s[0]) * s[s.dim() - 1];
}

} // namespace bellvqc::qsim
