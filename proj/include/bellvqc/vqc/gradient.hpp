#pragma once

#include <numbers>
#include <vector>

#include "bellvqc/vqc/observable.hpp"

namespace bellvqc::vqc {

/// True when the angle is generated by a single Pauli, exp(-i t P / 2), up to
/// a global phase. U3 = e^{i(phi+lambda)/2} RZ(phi) RY(theta) RZ(lambda), so
/// all three of its angles qualify.
[[nodiscard]] constexpr bool shift_eligible(qsim::GateKind k, std::size_t angle) noexcept {
    switch (k) {
    case qsim::GateKind::RZ:
    case qsim::GateKind::RX: return angle == 0;
    case qsim::GateKind::U3: return angle < 3;
    default: return false;
    }
}

/// Circuit in which every slot occurrence has its own slot; origin[o] is the
/// slot of the source circuit that occurrence o came from.
struct ExpandedCircuit {
    qsim::Circuit circuit;
    std::vector<std::size_t> origin;
};

[[nodiscard]] inline ExpandedCircuit expand_slots(const qsim::Circuit &c) {
    ExpandedCircuit out{qsim::Circuit(c.num_qubits()), {}};
    for (auto op : c.ops()) {
        for (std::size_t k = 0; k < op.angle_count(); ++k) {
            auto &a = op.angles[k];
            if (!a.is_slot()) continue;
            if (!shift_eligible(op.kind, k)) {
                throw UnsupportedGate("parameter slot on " + std::string(qsim::gate_name(op.kind)) +
                                      " is not parameter-shift eligible");
            }
            out.origin.push_back(a.slot);
            a.slot = out.circuit.new_param();
        }
        out.circuit.add(op);
    }
    return out;
}

struct GradientResult {
    std::vector<double> grad;
    std::size_t evaluations = 0;
    std::size_t shots = 0;
};

/// grad[k] = sum over occurrences of slot k of (E(+pi/2) - E(-pi/2)) / 2.
/// Slots with trainable[k] == false are skipped and report 0.
[[nodiscard]] inline GradientResult parameter_shift_gradient(
    const qsim::Circuit &circuit, const Evaluator &energy, std::span<const double> params,
    const std::vector<bool> &trainable = {}) {
    circuit.check_params(params);
    if (!trainable.empty() && trainable.size() != params.size()) {
        throw InvalidArgument("trainable mask length differs from parameter count");
    }
    const auto ex = expand_slots(circuit);
    std::vector<double> p(ex.origin.size());
    for (std::size_t o = 0; o < p.size(); ++o) p[o] = params[ex.origin[o]];

    GradientResult r;
    r.grad.assign(params.size(), 0.0);
    constexpr double shift = std::numbers::pi / 2.0;
    for (std::size_t o = 0; o < p.size(); ++o) {
        const auto k = ex.origin[o];
        if (!trainable.empty() && !trainable[k]) continue;
        const double saved = p[o];
        p[o] = saved + shift;
        const auto plus = energy(ex.circuit, p);
        p[o] = saved - shift;
        const auto minus = energy(ex.circuit, p);
        p[o] = saved;
        r.grad[k] += 0.5 * (plus.value - minus.value);
        r.evaluations += 2;
        r.shots += plus.shots + minus.shots;
    }
    return r;
}

} // namespace bellvqc::vqc
