#pragma once

#include <string>

#include "bellvqc/bell/lattice.hpp"
#include "bellvqc/qsim/circuit.hpp"

namespace bellvqc::vqc {

using qsim::Angle;
using qsim::Circuit;
namespace gates = qsim::gates;

enum class AnsatzFamily { honeycomb3block, chain, hierarchical };

[[nodiscard]] inline std::string_view family_name(AnsatzFamily f) {
    switch (f) {
    case AnsatzFamily::honeycomb3block: return "honeycomb3block";
    case AnsatzFamily::chain: return "chain";
    case AnsatzFamily::hierarchical: return "hierarchical";
    }
    return "?";
}

[[nodiscard]] inline AnsatzFamily parse_family(std::string_view s) {
    if (s == "honeycomb3block") return AnsatzFamily::honeycomb3block;
    if (s == "chain") return AnsatzFamily::chain;
    if (s == "hierarchical") return AnsatzFamily::hierarchical;
    throw InvalidArgument("unknown ansatz family '" + std::string(s) + "'");
}

/// Three blocks in r, b, g order. Each block is a Hadamard layer followed by
/// CNOT(A->B) RZ(theta on B) CNOT(A->B) on every link of that color.
[[nodiscard]] inline Circuit build_honeycomb_ansatz(const bell::HoneycombLattice &lat) {
    lat.validate();
    if (lat.links().empty()) throw InvalidArgument("lattice has no links");
    if (lat.num_sites() > qsim::max_qubits) {
        throw CapacityError("lattice has " + std::to_string(lat.num_sites()) +
                            " sites; statevector limit is " + std::to_string(qsim::max_qubits));
    }
    Circuit c(lat.num_sites());
    for (char color : bell::link_colors) {
        for (std::size_t q = 0; q < lat.num_sites(); ++q) c.add(gates::h(q));
        for (const auto &l : lat.links_of(color)) {
            c.add(gates::cnot(l.a, l.b));
            c.add(gates::rz(l.b, Angle::param(c.new_param())));
            c.add(gates::cnot(l.a, l.b));
        }
    }
    return c;
}

/// Per layer: U3(theta, 0, 0) on every qubit with theta free, then CZ on
/// (0,1), (2,3), ... and CZ on (1,2), (3,4), ...
///
/// theta is the angle a virtual-Z device carries in the Z rotation between
/// its two pi/2 pulses. Freeing lambda with theta = pi/2 fixed instead leaves
/// the first layer inert on |0...0> and the 11-site chain energy stuck at 0.
[[nodiscard]] inline Circuit build_chain_ansatz(std::size_t n, std::size_t layers) {
    if (n < 2) throw InvalidArgument("chain ansatz needs n >= 2");
    if (layers < 1) throw InvalidArgument("chain ansatz needs at least one layer");
    if (n > qsim::max_qubits) throw CapacityError("chain longer than the statevector limit");
    Circuit c(n);
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            c.add(gates::u3(q, Angle::param(c.new_param()), Angle::fixed(0.0), Angle::fixed(0.0)));
        }
        for (std::size_t q = 0; q + 1 < n; q += 2) c.add(gates::cz(q, q + 1));
        for (std::size_t q = 1; q + 1 < n; q += 2) c.add(gates::cz(q, q + 1));
    }
    return c;
}

inline constexpr std::size_t hierarchical_max_phase = 12;
inline constexpr std::size_t hierarchical_slots_per_phase = 6;

/// Slots [6(j-1), 6j) belong to sub-circuit j.
///
/// Sub-circuit 1: U3(q0), U3(q1), CNOT(0->1).
/// Sub-circuit j >= 2 on new qubits a = 2j-2, b = 2j-1 with boundary a-1:
///   U3(a), CNOT(a-1 -> a), U3(b), CNOT(a -> b).
[[nodiscard]] inline Circuit build_hierarchical_ansatz(std::size_t phase) {
    if (phase < 1 || phase > hierarchical_max_phase) {
        throw InvalidArgument("hierarchical phase must be in 1.." +
                              std::to_string(hierarchical_max_phase));
    }
    Circuit c(2 * phase);
    auto u3 = [&c](std::size_t q) {
        const auto t = c.new_param(), p = c.new_param(), l = c.new_param();
        c.add(gates::u3(q, Angle::param(t), Angle::param(p), Angle::param(l)));
    };
    u3(0);
    u3(1);
    c.add(gates::cnot(0, 1));
    for (std::size_t j = 2; j <= phase; ++j) {
        const std::size_t a = 2 * j - 2, b = 2 * j - 1;
        u3(a);
        c.add(gates::cnot(a - 1, a));
        u3(b);
        c.add(gates::cnot(a, b));
    }
    return c;
}

/// Trainable mask that frees only the slots of sub-circuit `phase`.
[[nodiscard]] inline std::vector<bool> hierarchical_phase_mask(std::size_t phase) {
    std::vector<bool> m(hierarchical_slots_per_phase * phase, false);
    for (std::size_t k = hierarchical_slots_per_phase * (phase - 1); k < m.size(); ++k) m[k] = true;
    return m;
}

} // namespace bellvqc::vqc
