#pragma once

#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "bellvqc/measure/readout.hpp"
#include "bellvqc/qsim/circuit.hpp"

namespace bellvqc::measure {

enum class Method { parity, mqc, sinusoid_fit };

[[nodiscard]] inline std::string_view method_name(Method m) {
    switch (m) {
    case Method::parity: return "parity";
    case Method::mqc: return "mqc";
    case Method::sinusoid_fit: return "sinusoid_fit";
    }
    return "?";
}

/// gamma_k = -pi/2 + pi k / samples, k = 0 .. samples-1. The default grid has
/// n+1 points; any grid with at least n+1 points extracts the coherence exactly.
[[nodiscard]] inline std::vector<double> parity_settings(std::size_t n, std::size_t samples = 0) {
    if (n < 2) throw InvalidArgument("parity settings need n >= 2");
    if (samples == 0) samples = n + 1;
    std::vector<double> g(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        g[k] = -std::numbers::pi / 2 + std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
    }
    return g;
}

/// phi_j = pi j / (n+1), j = 0 .. 2n+1.
[[nodiscard]] inline std::vector<double> mqc_settings(std::size_t n) {
    if (n < 2) throw InvalidArgument("MQC settings need n >= 2");
    std::vector<double> p(2 * n + 2);
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] = std::numbers::pi * static_cast<double>(j) / static_cast<double>(n + 1);
    }
    return p;
}

/// Shots per setting used for the GHZ-family measurements, keyed by even n.
[[nodiscard]] inline std::size_t shots_schedule(std::size_t n) {
    static constexpr std::size_t table[] = {900,  1500,  2400,  3600,  5000,  7200,
                                            9600, 12000, 15000, 20000, 25000, 30000};
    if (n < 2 || n > 24 || n % 2 != 0) {
        throw ConfigError("no default shot count for n = " + std::to_string(n) +
                          "; set shots explicitly");
    }
    return table[n / 2 - 1];
}

/// Appends U3(pi/2, gamma - pi, pi - gamma) to every qubit, so that a Z-basis
/// parity measures prod_j (cos gamma X_j + sin gamma Y_j).
inline void apply_parity_rotation(qsim::StateVector &s, double gamma) {
    using std::numbers::pi;
    const auto m = qsim::u3_matrix(pi / 2, gamma - pi, pi - gamma);
    for (std::size_t q = 0; q < s.num_qubits(); ++q) s.apply_1q(q, m);
}

/// Echo U -> RX(pi) layer -> RZ(phi) layer -> U^dagger, starting from U|0>.
inline void apply_mqc_echo(qsim::StateVector &s, double phi, const qsim::Circuit &inverse) {
    const auto x = qsim::rx_matrix(std::numbers::pi);
    const auto z = qsim::rz_matrix(phi);
    for (std::size_t q = 0; q < s.num_qubits(); ++q) s.apply_1q(q, x);
    for (std::size_t q = 0; q < s.num_qubits(); ++q) s.apply_1q(q, z);
    qsim::run_circuit(s, inverse, {});
}

struct PointOptions {
    std::size_t shots = 0; // 0: exact expectation
    ReadoutModel readout;  // empty: ideal
    bool mitigate = false;
};

struct Point {
    double value = 0.0;
    double std = 0.0;
    std::size_t shots = 0;
};

/// Standard error of (M+ - M-)/M with p = M+/M.
[[nodiscard]] inline double parity_std(double p, std::size_t shots) {
    return 2.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
}

[[nodiscard]] inline double probability_std(double p, std::size_t shots) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
}

namespace detail {

inline Point evaluate_point(const qsim::StateVector &s, const ProductWeights &o, const PointOptions &opt,
                            Engine &eng, bool binomial) {
    const std::size_t n = s.num_qubits();
    const bool noisy = opt.readout.num_qubits() != 0 && !opt.readout.is_ideal();
    if (noisy) opt.readout.check_size(n);
    const auto probs = s.probabilities();
    if (opt.shots == 0) {
        if (!noisy || opt.mitigate) return {product_expectation(probs, o), 0.0, 0};
        return {product_expectation(probs, noisy_weights(opt.readout, o)), 0.0, 0};
    }
    auto samples = qsim::sample_from_probabilities(probs, opt.shots, eng);
    if (noisy) samples = apply_readout_error(std::move(samples), opt.readout, eng);
    if (noisy && opt.mitigate) {
        const auto e = mitigate_readout(samples, opt.readout, o);
        return {e.value, e.std, e.shots};
    }
    const auto e = per_shot_mean(samples, o);
    if (!binomial) return {e.value, e.std, e.shots};
    if (o[0][1] < 0.0) return {e.value, parity_std((1.0 + e.value) / 2.0, opt.shots), e.shots};
    return {e.value, probability_std(e.value, opt.shots), e.shots};
}

} // namespace detail

/// Parity expectation of an already prepared state at angle gamma.
[[nodiscard]] inline Point parity_point(const qsim::StateVector &prepared, double gamma,
                                        const PointOptions &opt, Engine &eng) {
    auto s = prepared;
    apply_parity_rotation(s, gamma);
    return detail::evaluate_point(s, parity_weights(s.num_qubits()), opt, eng, true);
}

/// Probability of returning to |0...0> after the MQC echo at angle phi.
[[nodiscard]] inline Point mqc_point(const qsim::StateVector &prepared, double phi,
                                     const qsim::Circuit &inverse, const PointOptions &opt, Engine &eng) {
    auto s = prepared;
    apply_mqc_echo(s, phi, inverse);
    return detail::evaluate_point(s, ground_indicator_weights(s.num_qubits()), opt, eng, true);
}

[[nodiscard]] inline Point measure_parity(const qsim::Circuit &prep, std::span<const double> params,
                                          double gamma, const PointOptions &opt, Engine &eng) {
    return parity_point(qsim::prepare(prep, params), gamma, opt, eng);
}

[[nodiscard]] inline Point measure_mqc(const qsim::Circuit &prep, std::span<const double> params,
                                       double phi, const PointOptions &opt, Engine &eng) {
    const auto bound = prep.bind(params);
    return mqc_point(qsim::prepare(bound, {}), phi, bound.inverse(), opt, eng);
}

struct SignalTable {
    Method method = Method::parity;
    std::size_t num_qubits = 0;
    std::vector<double> settings;
    std::vector<double> values;
    std::vector<double> stds;
    std::vector<std::size_t> shots;
    std::size_t repetition = 0;

    [[nodiscard]] std::size_t size() const noexcept { return settings.size(); }
};

/// Streams are keyed by (seed, method, setting index, repetition), so the
/// table does not depend on evaluation order.
[[nodiscard]] inline SignalTable parity_signals(const qsim::StateVector &prepared,
                                                const std::vector<double> &gammas,
                                                const PointOptions &opt, std::uint64_t seed,
                                                std::size_t repetition = 0) {
    SignalTable t{Method::parity, prepared.num_qubits(), gammas, {}, {}, {}, repetition};
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        auto eng = make_engine({seed, "parity", k, repetition});
        const auto p = parity_point(prepared, gammas[k], opt, eng);
        t.values.push_back(p.value);
        t.stds.push_back(p.std);
        t.shots.push_back(p.shots);
    }
    return t;
}

[[nodiscard]] inline SignalTable mqc_signals(const qsim::StateVector &prepared, const qsim::Circuit &inverse,
                                             const std::vector<double> &phis, const PointOptions &opt,
                                             std::uint64_t seed, std::size_t repetition = 0) {
    SignalTable t{Method::mqc, prepared.num_qubits(), phis, {}, {}, {}, repetition};
    for (std::size_t k = 0; k < phis.size(); ++k) {
        auto eng = make_engine({seed, "mqc", k, repetition});
        const auto p = mqc_point(prepared, phis[k], inverse, opt, eng);
        t.values.push_back(p.value);
        t.stds.push_back(p.std);
        t.shots.push_back(p.shots);
    }
    return t;
}

/// CSV with columns method, angle, value, std, shots, repetition; numbers in %.17g.
inline void write_signals_csv(const std::string &path, const std::vector<SignalTable> &tables) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot write signals to " + path);
    os << "method,angle,value,std,shots,repetition\n";
    char buf[128];
    for (const auto &t : tables) {
        for (std::size_t k = 0; k < t.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,%zu", t.settings[k], t.values[k],
                          t.stds[k], t.shots[k], t.repetition);
            os << method_name(t.method) << ',' << buf << '\n';
        }
    }
}

} // namespace bellvqc::measure
