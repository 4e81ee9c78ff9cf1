#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "bellvqc/qsim/state_vector.hpp"

namespace bellvqc::qsim {

enum class GateKind { U3, H, RZ, RX, CZ, CNOT };

[[nodiscard]] constexpr std::string_view gate_name(GateKind k) noexcept {
    switch (k) {
    case GateKind::U3: return "U3";
    case GateKind::H: return "H";
    case GateKind::RZ: return "RZ";
    case GateKind::RX: return "RX";
    case GateKind::CZ: return "CZ";
    case GateKind::CNOT: return "CNOT";
    }
    return "?";
}

[[nodiscard]] constexpr std::size_t num_angles(GateKind k) noexcept {
    switch (k) {
    case GateKind::U3: return 3;
    case GateKind::RZ:
    case GateKind::RX: return 1;
    default: return 0;
    }
}

[[nodiscard]] constexpr std::size_t num_targets(GateKind k) noexcept {
    return (k == GateKind::CZ || k == GateKind::CNOT) ? 2 : 1;
}

/// One rotation angle of a gate: a constant, a circuit parameter slot, or left
/// open to be supplied at application time.
struct Angle {
    enum class Source { fixed, slot, open };
    Source source = Source::fixed;
    double value = 0.0;
    std::size_t slot = 0;

    [[nodiscard]] static Angle fixed(double v) { return {Source::fixed, v, 0}; }
    [[nodiscard]] static Angle param(std::size_t s) { return {Source::slot, 0.0, s}; }
    [[nodiscard]] static Angle open() { return {Source::open, 0.0, 0}; }

    [[nodiscard]] bool is_fixed() const noexcept { return source == Source::fixed; }
    [[nodiscard]] bool is_slot() const noexcept { return source == Source::slot; }
};

struct GateOp {
    GateKind kind = GateKind::H;
    std::array<std::size_t, 2> targets{0, 0}; // targets[0] is the control for CNOT
    std::array<Angle, 3> angles{};            // U3: (theta, phi, lambda)

    [[nodiscard]] std::size_t arity() const noexcept { return num_targets(kind); }
    [[nodiscard]] std::size_t angle_count() const noexcept { return num_angles(kind); }
};

namespace gates {

[[nodiscard]] inline GateOp h(std::size_t q) { return {GateKind::H, {q, q}, {}}; }
[[nodiscard]] inline GateOp cz(std::size_t a, std::size_t b) { return {GateKind::CZ, {a, b}, {}}; }
[[nodiscard]] inline GateOp cnot(std::size_t c, std::size_t t) {
    return {GateKind::CNOT, {c, t}, {}};
}
[[nodiscard]] inline GateOp rz(std::size_t q, Angle a) { return {GateKind::RZ, {q, q}, {a, {}, {}}}; }
[[nodiscard]] inline GateOp rz(std::size_t q, double a) { return rz(q, Angle::fixed(a)); }
[[nodiscard]] inline GateOp rx(std::size_t q, Angle a) { return {GateKind::RX, {q, q}, {a, {}, {}}}; }
[[nodiscard]] inline GateOp rx(std::size_t q, double a) { return rx(q, Angle::fixed(a)); }
[[nodiscard]] inline GateOp u3(std::size_t q, Angle theta, Angle phi, Angle lambda) {
    return {GateKind::U3, {q, q}, {theta, phi, lambda}};
}
[[nodiscard]] inline GateOp u3(std::size_t q, double theta, double phi, double lambda) {
    return u3(q, Angle::fixed(theta), Angle::fixed(phi), Angle::fixed(lambda));
}

} // namespace gates

/// U(theta, phi, lambda) in the native-gate parameterization:
/// [[cos t/2, -e^{i l} sin t/2], [e^{i p} sin t/2, e^{i(p+l)} cos t/2]].
[[nodiscard]] inline Mat2 u3_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {cplx{c, 0.0}, -std::polar(s, lambda), std::polar(s, phi),
            std::polar(c, phi + lambda)};
}

[[nodiscard]] inline Mat2 rz_matrix(double theta) {
    return {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)};
}

[[nodiscard]] inline Mat2 rx_matrix(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {cplx{c, 0.0}, cplx{0.0, -s}, cplx{0.0, -s}, cplx{c, 0.0}};
}

[[nodiscard]] inline Mat2 hadamard_matrix() {
    const double r = std::numbers::sqrt2 / 2.0;
    return {r, r, r, -r};
}

/// Applies `op` with its angles already resolved to numbers.
inline void apply_resolved(StateVector &state, const GateOp &op,
                           const std::array<double, 3> &ang) {
    const auto q = op.targets[0];
    switch (op.kind) {
    case GateKind::H: state.apply_1q(q, hadamard_matrix()); break;
    case GateKind::RZ: {
        const auto m = rz_matrix(ang[0]);
        state.apply_diag_1q(q, m[0], m[3]);
        break;
    }
    case GateKind::RX: state.apply_1q(q, rx_matrix(ang[0])); break;
    case GateKind::U3: state.apply_1q(q, u3_matrix(ang[0], ang[1], ang[2])); break;
    case GateKind::CZ: state.apply_cz(op.targets[0], op.targets[1]); break;
    case GateKind::CNOT: state.apply_cnot(op.targets[0], op.targets[1]); break;
    }
}

/// Applies a single gate. Fixed angles are used as stored; every angle that is
/// slot-bound or open must be supplied, in order, through `supplied`.
inline void apply_gate(StateVector &state, const GateOp &op,
                       std::span<const double> supplied = {}) {
    std::array<double, 3> ang{0.0, 0.0, 0.0};
    std::size_t used = 0;
    for (std::size_t k = 0; k < op.angle_count(); ++k) {
        if (op.angles[k].is_fixed()) {
            ang[k] = op.angles[k].value;
        } else {
            if (used >= supplied.size()) {
                throw InvalidArgument(std::string("missing angle for ") +
                                      std::string(gate_name(op.kind)));
            }
            ang[k] = supplied[used++];
        }
    }
    if (used != supplied.size()) {
        throw InvalidArgument(std::string("unexpected angle supplied to ") +
                              std::string(gate_name(op.kind)));
    }
    apply_resolved(state, op, ang);
}

} // namespace bellvqc::qsim
