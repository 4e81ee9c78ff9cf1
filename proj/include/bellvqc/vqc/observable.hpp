#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <variant>

#include "bellvqc/qsim/circuit.hpp"
#include "bellvqc/qsim/pauli_sum.hpp"

namespace bellvqc::vqc {

/// H_B(N) = 2^{(N-1)/2} (|0...0><1...1| + h.c.), whose expectation is
/// 2^{(N+1)/2} Re<C> with <C> the antidiagonal coherence.
struct GhzOperator {
    std::size_t num_qubits = 2;
};

using Observable = std::variant<qsim::PauliSum, GhzOperator>;

[[nodiscard]] inline std::size_t num_qubits(const Observable &h) {
    return std::visit(
        [](const auto &o) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(o)>, GhzOperator>) {
                return o.num_qubits;
            } else {
                return o.num_qubits();
            }
        },
        h);
}

[[nodiscard]] inline double ghz_energy_from_coherence(std::size_t n, qsim::cplx c) {
    return std::pow(2.0, (static_cast<double>(n) + 1.0) / 2.0) * c.real();
}

struct EnergyEstimate {
    double value = 0.0;
    double std = 0.0;
    std::size_t shots = 0;
};

/// Energy functional E(circuit, params). Shot-mode evaluators are stateful
/// (each call draws from the next RNG stream), so call order matters.
using Evaluator = std::function<EnergyEstimate(const qsim::Circuit &, std::span<const double>)>;

/// Exact statevector expectation of a fixed observable.
class ExactExpectation {
public:
    explicit ExactExpectation(Observable h) : h_(std::move(h)) {
        if (auto *p = std::get_if<qsim::PauliSum>(&h_)) {
            compiled_ = std::make_shared<qsim::CompiledPauliSum>(*p);
            scale_ = std::max(1.0, p->coefficient_l1());
        }
    }

    [[nodiscard]] const Observable &observable() const noexcept { return h_; }

    [[nodiscard]] double operator()(const qsim::StateVector &s) const {
        if (s.num_qubits() != num_qubits(h_)) {
            throw InvalidArgument("observable acts on " + std::to_string(num_qubits(h_)) +
                                  " qubits, state has " + std::to_string(s.num_qubits()));
        }
        if (compiled_) {
            const auto v = compiled_->expectation_complex(s.amplitudes());
            if (std::abs(v.imag()) > 1e-10 * scale_) {
                throw NumericalError("expectation has imaginary part " + std::to_string(v.imag()));
            }
            return v.real();
        }
        return ghz_energy_from_coherence(s.num_qubits(), qsim::antidiagonal_coherence(s));
    }

private:
    Observable h_;
    std::shared_ptr<qsim::CompiledPauliSum> compiled_;
    double scale_ = 1.0;
};

[[nodiscard]] inline double expectation(const qsim::StateVector &s, const Observable &h) {
    return ExactExpectation(h)(s);
}

[[nodiscard]] inline Evaluator exact_evaluator(Observable h) {
    auto e = std::make_shared<ExactExpectation>(std::move(h));
    return [e](const qsim::Circuit &c, std::span<const double> p) {
        const auto v = (*e)(qsim::prepare(c, p));
        if (!std::isfinite(v)) throw NumericalError("energy evaluated to a non-finite value");
        return EnergyEstimate{v, 0.0, 0};
    };
}

} // namespace bellvqc::vqc
