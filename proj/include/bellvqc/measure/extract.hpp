#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "bellvqc/measure/signals.hpp"

namespace bellvqc::measure {

using qsim::cplx;

struct CoherenceEstimate {
    Method method = Method::parity;
    std::size_t num_qubits = 0;
    /// <C> for parity and fit; |<C>| (real) for MQC.
    cplx value{};
    double std = 0.0;      // real quadrature (parity, fit) or magnitude (MQC)
    double std_imag = 0.0; // imaginary quadrature; 0 for MQC
    std::optional<double> energy;
    double energy_std = 0.0;
    std::vector<std::string> warnings;
};

[[nodiscard]] inline double ghz_energy_scale(std::size_t n) {
    return std::pow(2.0, (static_cast<double>(n) + 1.0) / 2.0);
}

namespace detail {

inline void check_grid(const SignalTable &t, const std::vector<double> &expected, Method m) {
    if (t.method != m) throw InvalidArgument("signal table holds a different method");
    if (t.values.size() != t.size() || t.stds.size() != t.size()) {
        throw InvalidArgument("signal table columns differ in length");
    }
    if (expected.size() != t.size()) throw InvalidArgument("settings mismatch: wrong number of angles");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (std::abs(expected[k] - t.settings[k]) > 1e-12) {
            throw InvalidArgument("settings mismatch at index " + std::to_string(k));
        }
    }
}

} // namespace detail

/// <C> = N_s^{-1} sum_gamma e^{+i n gamma} <P(gamma)>; this component equals
/// conj(a_{0...0}) a_{1...1}. Each quadrature carries its own weighted std.
[[nodiscard]] inline CoherenceEstimate extract_coherence_parity(const SignalTable &t, std::size_t n) {
    detail::check_grid(t, parity_settings(n, t.size()), Method::parity);
    CoherenceEstimate e;
    e.method = Method::parity;
    e.num_qubits = n;
    const double ns = static_cast<double>(t.size());
    double re = 0.0, im = 0.0, vre = 0.0, vim = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double a = static_cast<double>(n) * t.settings[k];
        const double c = std::cos(a), s = std::sin(a);
        re += c * t.values[k];
        im += s * t.values[k];
        vre += c * c * t.stds[k] * t.stds[k];
        vim += s * s * t.stds[k] * t.stds[k];
    }
    e.value = {re / ns, im / ns};
    e.std = std::sqrt(vre) / ns;
    e.std_imag = std::sqrt(vim) / ns;
    e.energy = ghz_energy_scale(n) * e.value.real();
    e.energy_std = ghz_energy_scale(n) * e.std;
    if (t.size() < n + 1) {
        e.warnings.push_back("parity grid of " + std::to_string(t.size()) + " points aliases frequency " +
                             std::to_string(n) + "; extraction is not exact");
    }
    return e;
}

/// |<C>| = sqrt(N_s^{-1} |sum_phi e^{i n phi} K(phi)|), first-order std.
/// When the radicand is smaller than its own std the reported std is
/// sqrt(radicand std), the scale at which the magnitude becomes resolvable.
[[nodiscard]] inline CoherenceEstimate extract_coherence_mqc(const SignalTable &t, std::size_t n) {
    detail::check_grid(t, mqc_settings(n), Method::mqc);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double tol = 3.0 * t.stds[k] + 1e-9;
        if (t.values[k] < -tol || t.values[k] > 1.0 + tol) {
            throw SignalsInconsistent("MQC return probability " + std::to_string(t.values[k]) +
                                      " at phi index " + std::to_string(k) + " is outside [0, 1]");
        }
    }
    const double ns = static_cast<double>(t.size());
    double re = 0.0, im = 0.0, vre = 0.0, vim = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double a = static_cast<double>(n) * t.settings[k];
        const double c = std::cos(a), s = std::sin(a);
        re += c * t.values[k];
        im += s * t.values[k];
        vre += c * c * t.stds[k] * t.stds[k];
        vim += s * s * t.stds[k] * t.stds[k];
    }
    const double mag = std::hypot(re, im);
    const double radicand = mag / ns;
    double radicand_std = 0.0;
    if (mag > 0.0) {
        radicand_std = std::sqrt(re * re * vre + im * im * vim) / mag / ns;
    } else {
        radicand_std = std::sqrt(std::max(vre, vim)) / ns;
    }

    CoherenceEstimate e;
    e.method = Method::mqc;
    e.num_qubits = n;
    e.value = std::sqrt(radicand);
    if (radicand_std == 0.0) {
        e.std = 0.0;
    } else if (radicand < radicand_std) {
        e.std = std::sqrt(radicand_std);
        e.warnings.push_back("MQC radicand below its standard error; std floored");
    } else {
        e.std = radicand_std / (2.0 * std::sqrt(radicand));
    }
    return e;
}

/// Energy from an MQC magnitude and the phase of a parity estimate.
[[nodiscard]] inline CoherenceEstimate with_parity_phase(CoherenceEstimate mqc, const CoherenceEstimate &parity) {
    if (mqc.method != Method::mqc || parity.method == Method::mqc) {
        throw InvalidArgument("with_parity_phase takes an MQC estimate and a parity-phase estimate");
    }
    const double c = std::abs(parity.value) > 0.0 ? parity.value.real() / std::abs(parity.value) : 0.0;
    mqc.energy = ghz_energy_scale(mqc.num_qubits) * mqc.value.real() * c;
    mqc.energy_std = ghz_energy_scale(mqc.num_qubits) * mqc.std * std::abs(c);
    return mqc;
}

struct SinusoidFit {
    double amplitude = 0.0;
    double phase = 0.0;
    /// a cos(f g + b) = A cos(f g) - B sin(f g); covariance of (A, B).
    double cov_aa = 0.0, cov_ab = 0.0, cov_bb = 0.0;
    double cos_coeff = 0.0, sin_coeff = 0.0; // A, B
};

/// Least-squares fit of a cos(freq g + b), weighted by 1/std^2 when every
/// std is positive.
[[nodiscard]] inline SinusoidFit sinusoid_fit(const SignalTable &t, int freq) {
    if (t.size() < 3) throw InvalidArgument("sinusoid fit needs at least 3 settings");
    bool weighted = true;
    for (double s : t.stds) weighted = weighted && s > 0.0;
    double scc = 0.0, scs = 0.0, sss = 0.0, yc = 0.0, ys = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double w = weighted ? 1.0 / (t.stds[k] * t.stds[k]) : 1.0;
        const double c = std::cos(freq * t.settings[k]);
        const double s = -std::sin(freq * t.settings[k]);
        scc += w * c * c;
        scs += w * c * s;
        sss += w * s * s;
        yc += w * c * t.values[k];
        ys += w * s * t.values[k];
    }
    const double det = scc * sss - scs * scs;
    if (!(det > 1e-12 * std::max(1.0, scc * sss))) {
        throw NumericalError("sinusoid fit design matrix is rank deficient");
    }
    SinusoidFit f;
    f.cos_coeff = (sss * yc - scs * ys) / det;
    f.sin_coeff = (scc * ys - scs * yc) / det;
    f.amplitude = std::hypot(f.cos_coeff, f.sin_coeff);
    f.phase = f.amplitude > 0.0 ? std::atan2(f.sin_coeff, f.cos_coeff) : 0.0;
    if (f.phase <= -std::numbers::pi) f.phase += 2.0 * std::numbers::pi;

    // inverse normal matrix (times residual variance when unweighted)
    double sigma2 = 1.0;
    if (!weighted) {
        double rss = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const double r = t.values[k] - f.cos_coeff * std::cos(freq * t.settings[k]) +
                             f.sin_coeff * std::sin(freq * t.settings[k]);
            rss += r * r;
        }
        sigma2 = rss / static_cast<double>(t.size() - 2);
    }
    f.cov_aa = sigma2 * sss / det;
    f.cov_bb = sigma2 * scc / det;
    f.cov_ab = -sigma2 * scs / det;
    return f;
}

/// <P(g)> = 2|C| cos(n g - arg C), so C = (A - iB) / 2.
[[nodiscard]] inline CoherenceEstimate coherence_from_fit(const SinusoidFit &f, std::size_t n) {
    CoherenceEstimate e;
    e.method = Method::sinusoid_fit;
    e.num_qubits = n;
    e.value = {f.cos_coeff / 2.0, -f.sin_coeff / 2.0};
    e.std = std::sqrt(f.cov_aa) / 2.0;
    e.std_imag = std::sqrt(f.cov_bb) / 2.0;
    e.energy = ghz_energy_scale(n) * e.value.real();
    e.energy_std = ghz_energy_scale(n) * e.std;
    return e;
}

} // namespace bellvqc::measure
