#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bellvqc/qsim/state_vector.hpp"

namespace bellvqc::qsim {

/// One weighted Pauli string; ops[q] in {I,X,Y,Z} acts on qubit q.
struct PauliTerm {
    double coeff = 0.0;
    std::string ops;
};

/// Real-weighted sum of Pauli strings on a fixed number of qubits.
class PauliSum {
public:
    PauliSum() = default;
    explicit PauliSum(std::size_t num_qubits) : num_qubits_(num_qubits) {}

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] const std::vector<PauliTerm> &terms() const noexcept { return terms_; }
    [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }

    PauliSum &add(double coeff, std::string ops) {
        if (ops.size() != num_qubits_) {
            throw InvalidArgument("Pauli string '" + ops + "' has length " +
                                  std::to_string(ops.size()) + ", expected " +
                                  std::to_string(num_qubits_));
        }
        if (!std::isfinite(coeff)) throw InvalidArgument("Pauli coefficient must be finite");
        for (char c : ops) {
            if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
                throw InvalidArgument(std::string("invalid Pauli letter '") + c + "'");
            }
        }
        terms_.push_back({coeff, std::move(ops)});
        return *this;
    }

    /// Sparse form: add(c, {{0,'X'},{3,'X'}}) places X on qubits 0 and 3.
    PauliSum &add(double coeff, std::initializer_list<std::pair<std::size_t, char>> sites) {
        std::string s(num_qubits_, 'I');
        for (auto [q, p] : sites) {
            if (q >= num_qubits_) throw InvalidArgument("Pauli site out of range");
            s[q] = p;
        }
        return add(coeff, std::move(s));
    }

    PauliSum &operator+=(const PauliSum &o) {
        if (o.num_qubits_ != num_qubits_) throw InvalidArgument("Pauli sums differ in size");
        terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
        return *this;
    }

    /// Merges identical strings and drops terms with |coeff| <= tol.
    [[nodiscard]] PauliSum simplified(double tol = 0.0) const {
        std::map<std::string, double> acc;
        for (const auto &t : terms_) acc[t.ops] += t.coeff;
        PauliSum out(num_qubits_);
        for (auto &[s, c] : acc) {
            if (std::abs(c) > tol) out.terms_.push_back({c, s});
        }
        return out;
    }

    [[nodiscard]] double coefficient_l1() const {
        double s = 0.0;
        for (const auto &t : terms_) s += std::abs(t.coeff);
        return s;
    }

private:
    std::size_t num_qubits_ = 0;
    std::vector<PauliTerm> terms_;
};

/// Bitmask form of a PauliSum grouped by flip pattern. For a string P with
/// flip mask f (X or Y) and sign mask s (Y or Z):
///   P|b> = i^{#Y} (-1)^{popcount(b & s)} |b ^ f>.
class CompiledPauliSum {
public:
    struct Entry {
        cplx coeff; // coefficient times i^{#Y}
        std::uint64_t sign_mask;
    };
    struct Group {
        std::uint64_t flip_mask;
        std::vector<Entry> entries;
        /// Qubits touched by any sign mask, and phase[k] = sum of signed
        /// coefficients for the k-th assignment of those qubits.
        std::vector<std::size_t> sign_qubits;
        std::vector<cplx> phase;
        /// byte_index[8 * 256 ... ]: table index contributed by each byte of b.
        std::vector<std::uint32_t> byte_index;

        [[nodiscard]] std::size_t index(std::uint64_t b) const noexcept {
            std::size_t k = 0;
            for (std::size_t j = 0; b != 0; ++j, b >>= 8) k |= byte_index[256 * j + (b & 0xFF)];
            return k;
        }
    };

    explicit CompiledPauliSum(const PauliSum &h) : num_qubits_(h.num_qubits()) {
        if (num_qubits_ > 63) throw CapacityError("Pauli sum too wide for bitmask form");
        std::map<std::uint64_t, std::vector<Entry>> by_flip;
        static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        for (const auto &t : h.terms()) {
            std::uint64_t f = 0, s = 0;
            int ny = 0;
            for (std::size_t q = 0; q < t.ops.size(); ++q) {
                const std::uint64_t bit = std::uint64_t{1} << q;
                switch (t.ops[q]) {
                case 'X': f |= bit; break;
                case 'Y': f |= bit; s |= bit; ++ny; break;
                case 'Z': s |= bit; break;
                default: break;
                }
            }
            by_flip[f].push_back({t.coeff * ipow[ny % 4], s});
        }
        for (auto &[f, e] : by_flip) {
            Group g{f, std::move(e), {}, {}, {}};
            std::uint64_t used = 0;
            for (const auto &x : g.entries) used |= x.sign_mask;
            for (std::size_t q = 0; q < num_qubits_; ++q) {
                if ((used >> q) & 1u) g.sign_qubits.push_back(q);
            }
            if (g.sign_qubits.size() <= max_table_bits) {
                g.phase.assign(std::size_t{1} << g.sign_qubits.size(), cplx{0.0, 0.0});
                for (std::size_t k = 0; k < g.phase.size(); ++k) {
                    std::uint64_t b = 0;
                    for (std::size_t j = 0; j < g.sign_qubits.size(); ++j) {
                        if ((k >> j) & 1u) b |= std::uint64_t{1} << g.sign_qubits[j];
                    }
                    g.phase[k] = phase_of(g, b);
                }
                const std::size_t bytes = (num_qubits_ + 7) / 8;
                g.byte_index.assign(256 * std::max<std::size_t>(bytes, 1), 0);
                for (std::size_t j = 0; j < g.sign_qubits.size(); ++j) {
                    const std::size_t q = g.sign_qubits[j];
                    for (std::size_t v = 0; v < 256; ++v) {
                        if ((v >> (q % 8)) & 1u) g.byte_index[256 * (q / 8) + v] |= std::uint32_t{1} << j;
                    }
                }
            }
            groups_.push_back(std::move(g));
        }
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] const std::vector<Group> &groups() const noexcept { return groups_; }

    /// <psi|H|psi> as a complex number (imaginary part is round-off for
    /// Hermitian H).
    [[nodiscard]] cplx expectation_complex(std::span<const cplx> psi) const {
        cplx total{0.0, 0.0};
        for (const auto &g : groups_) {
            double re = 0.0, im = 0.0;
            auto accumulate = [&](std::size_t b, cplx ph) {
                const cplx a = psi[b], c = psi[b ^ g.flip_mask];
                const double xr = c.real() * a.real() + c.imag() * a.imag();
                const double xi = c.real() * a.imag() - c.imag() * a.real();
                re += xr * ph.real() - xi * ph.imag();
                im += xr * ph.imag() + xi * ph.real();
            };
            if (g.phase.empty()) {
                for (std::size_t b = 0; b < psi.size(); ++b) accumulate(b, phase_of(g, b));
            } else {
                // The low byte varies fastest; the rest of the index is fixed per block.
                const std::size_t block = std::min<std::size_t>(256, psi.size());
                for (std::size_t hi = 0; hi < psi.size(); hi += block) {
                    const std::size_t base = g.index(hi);
                    for (std::size_t lo = 0; lo < block; ++lo) {
                        accumulate(hi | lo, g.phase[base | g.byte_index[lo]]);
                    }
                }
            }
            total += cplx{re, im};
        }
        return total;
    }

    /// out = H * in.
    void apply(std::span<const cplx> in, std::span<cplx> out) const {
        std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
        for (const auto &g : groups_) {
            for (std::size_t b = 0; b < in.size(); ++b) {
                out[b ^ g.flip_mask] += mul(phase(g, b), in[b]);
            }
        }
    }

private:
    static constexpr std::size_t max_table_bits = 12;

    [[nodiscard]] static cplx phase_of(const Group &g, std::uint64_t b) noexcept {
        cplx p{0.0, 0.0};
        for (const auto &e : g.entries) p += (std::popcount(b & e.sign_mask) & 1) ? -e.coeff : e.coeff;
        return p;
    }

    [[nodiscard]] static cplx phase(const Group &g, std::uint64_t b) noexcept {
        return g.phase.empty() ? phase_of(g, b) : g.phase[g.index(b)];
    }

    std::size_t num_qubits_;
    std::vector<Group> groups_;
};

/// sum_k c_k <psi|P_k|psi>. Streams over amplitudes; no matrix is formed.
[[nodiscard]] inline double expectation_pauli_sum(const StateVector &state, const PauliSum &h) {
    if (h.num_qubits() != state.num_qubits()) {
        throw InvalidArgument("Pauli sum acts on " + std::to_string(h.num_qubits()) +
                              " qubits but state has " + std::to_string(state.num_qubits()));
    }
    const CompiledPauliSum compiled(h);
    const cplx v = compiled.expectation_complex(state.amplitudes());
    const double scale = std::max(1.0, h.coefficient_l1());
    if (std::abs(v.imag()) > 1e-10 * scale) {
        throw NumericalError("non-negligible imaginary part in Pauli expectation");
    }
    return v.real();
}

} // namespace bellvqc::qsim
