#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "bellvqc/qsim/gate.hpp"

namespace bellvqc::qsim {

/// Ordered gate program over `num_qubits` qubits with `num_params` parameter
/// slots. Every slot must be bound by at least one gate before execution.
class Circuit {
public:
    Circuit() = default;
    explicit Circuit(std::size_t num_qubits, std::size_t num_params = 0)
        : num_qubits_(num_qubits), slot_uses_(num_params, 0) {
        if (num_qubits == 0) throw InvalidArgument("circuit needs at least one qubit");
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t num_params() const noexcept { return slot_uses_.size(); }
    [[nodiscard]] const std::vector<GateOp> &ops() const noexcept { return ops_; }
    [[nodiscard]] std::size_t size() const noexcept { return ops_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ops_.empty(); }

    /// Reserves a fresh parameter slot and returns its index.
    std::size_t new_param() {
        slot_uses_.push_back(0);
        return slot_uses_.size() - 1;
    }

    Circuit &add(const GateOp &op) {
        for (std::size_t t = 0; t < op.arity(); ++t) {
            if (op.targets[t] >= num_qubits_) {
                throw InvalidArgument("gate target " + std::to_string(op.targets[t]) +
                                      " out of range");
            }
        }
        if (op.arity() == 2 && op.targets[0] == op.targets[1]) {
            throw InvalidArgument("two-qubit gate targets must be distinct");
        }
        for (std::size_t k = 0; k < op.angle_count(); ++k) {
            const auto &a = op.angles[k];
            if (a.source == Angle::Source::open) {
                throw InvalidArgument("circuit gates cannot carry open angles");
            }
            if (a.is_slot()) {
                if (a.slot >= slot_uses_.size()) {
                    throw InvalidArgument("parameter slot " + std::to_string(a.slot) +
                                          " not declared");
                }
                ++slot_uses_[a.slot];
            }
        }
        ops_.push_back(op);
        return *this;
    }

    /// Appends `other`, shifting its slot indices by `slot_offset` into this
    /// circuit's slot space (slots must already exist here).
    Circuit &append(const Circuit &other, std::size_t slot_offset = 0) {
        if (other.num_qubits() > num_qubits_) {
            throw InvalidArgument("appended circuit acts on more qubits");
        }
        for (auto op : other.ops()) {
            for (auto &a : op.angles) {
                if (a.is_slot()) a.slot += slot_offset;
            }
            add(op);
        }
        return *this;
    }

    /// Number of gates bound to each slot.
    [[nodiscard]] const std::vector<int> &slot_uses() const noexcept { return slot_uses_; }

    void validate() const {
        for (std::size_t s = 0; s < slot_uses_.size(); ++s) {
            if (slot_uses_[s] == 0) {
                throw InvalidArgument("parameter slot " + std::to_string(s) +
                                      " is not bound by any gate");
            }
        }
    }

    /// Resolves the angles of op `i` under `params`.
    [[nodiscard]] std::array<double, 3> resolve(const GateOp &op,
                                                std::span<const double> params) const {
        std::array<double, 3> ang{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < op.angle_count(); ++k) {
            const auto &a = op.angles[k];
            ang[k] = a.is_slot() ? params[a.slot] : a.value;
        }
        return ang;
    }

    /// Copy with every slot replaced by its value; the result has no slots.
    [[nodiscard]] Circuit bind(std::span<const double> params) const {
        check_params(params);
        Circuit out(num_qubits_);
        for (auto op : ops_) {
            const auto ang = resolve(op, params);
            for (std::size_t k = 0; k < op.angle_count(); ++k) {
                op.angles[k] = Angle::fixed(ang[k]);
            }
            out.add(op);
        }
        return out;
    }

    /// U^dagger of a fully bound circuit.
    [[nodiscard]] Circuit inverse() const {
        if (num_params() != 0) throw InvalidArgument("bind parameters before inverting");
        Circuit out(num_qubits_);
        for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
            GateOp op = *it;
            switch (op.kind) {
            case GateKind::RZ:
            case GateKind::RX: op.angles[0].value = -op.angles[0].value; break;
            case GateKind::U3: {
                const double t = op.angles[0].value;
                const double p = op.angles[1].value;
                const double l = op.angles[2].value;
                op.angles = {Angle::fixed(-t), Angle::fixed(-l), Angle::fixed(-p)};
                break;
            }
            default: break; // H, CZ, CNOT are self-inverse
            }
            out.add(op);
        }
        return out;
    }

    /// Rewrites into the native set {U3, CZ}: H = U3(pi/2, 0, pi),
    /// RZ(t) = U3(0, 0, t), RX(t) = U3(t, -pi/2, pi/2), CNOT = H.CZ.H on the
    /// target. Equal to the original up to a global phase; slot bindings carry
    /// over.
    [[nodiscard]] Circuit compile_native() const {
        using std::numbers::pi;
        Circuit out(num_qubits_, num_params());
        auto fx = [](double v) { return Angle::fixed(v); };
        for (const auto &op : ops_) {
            const auto q = op.targets[0];
            switch (op.kind) {
            case GateKind::H: out.add(gates::u3(q, fx(pi / 2), fx(0.0), fx(pi))); break;
            case GateKind::RZ: out.add(gates::u3(q, fx(0.0), fx(0.0), op.angles[0])); break;
            case GateKind::RX:
                out.add(gates::u3(q, op.angles[0], fx(-pi / 2), fx(pi / 2)));
                break;
            case GateKind::CNOT: {
                const auto t = op.targets[1];
                out.add(gates::u3(t, fx(pi / 2), fx(0.0), fx(pi)));
                out.add(gates::cz(q, t));
                out.add(gates::u3(t, fx(pi / 2), fx(0.0), fx(pi)));
                break;
            }
            default: out.add(op); break;
            }
        }
        return out;
    }

    void check_params(std::span<const double> params) const {
        if (params.size() != num_params()) {
            throw InvalidArgument("expected " + std::to_string(num_params()) +
                                  " parameters, got " + std::to_string(params.size()));
        }
    }

private:
    std::size_t num_qubits_ = 1;
    std::vector<GateOp> ops_;
    std::vector<int> slot_uses_;
};

/// Applies the circuit in order, substituting parameter slots.
inline void run_circuit(StateVector &state, const Circuit &circuit,
                        std::span<const double> params) {
    if (circuit.num_qubits() != state.num_qubits()) {
        throw InvalidArgument("circuit acts on " + std::to_string(circuit.num_qubits()) +
                              " qubits but state has " +
                              std::to_string(state.num_qubits()));
    }
    circuit.check_params(params);
    circuit.validate();
    for (const auto &op : circuit.ops()) {
        apply_resolved(state, op, circuit.resolve(op, params));
    }
}

/// U(params)|0...0>.
[[nodiscard]] inline StateVector prepare(const Circuit &circuit,
                                         std::span<const double> params) {
    StateVector s(circuit.num_qubits());
    run_circuit(s, circuit, params);
    return s;
}

} // namespace bellvqc::qsim
