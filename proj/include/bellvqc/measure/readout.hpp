#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bellvqc/qsim/sampling.hpp"
#include "bellvqc/rng.hpp"

namespace bellvqc::measure {

using qsim::Bitstring;

/// Per-qubit assignment errors. e0[q] = P(read 1 | true 0), e1[q] = P(read 0 | true 1).
class ReadoutModel {
public:
    ReadoutModel() = default;
    ReadoutModel(std::vector<double> e0, std::vector<double> e1) : e0_(std::move(e0)), e1_(std::move(e1)) {
        validate();
    }

    [[nodiscard]] static ReadoutModel ideal(std::size_t n) {
        return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    }
    [[nodiscard]] static ReadoutModel symmetric(std::size_t n, double e) {
        return {std::vector<double>(n, e), std::vector<double>(n, e)};
    }
    [[nodiscard]] static ReadoutModel uniform(std::size_t n, double e0, double e1) {
        return {std::vector<double>(n, e0), std::vector<double>(n, e1)};
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return e0_.size(); }
    [[nodiscard]] double e0(std::size_t q) const { return e0_.at(q); }
    [[nodiscard]] double e1(std::size_t q) const { return e1_.at(q); }

    [[nodiscard]] bool is_ideal() const noexcept {
        for (std::size_t q = 0; q < e0_.size(); ++q) {
            if (e0_[q] != 0.0 || e1_[q] != 0.0) return false;
        }
        return true;
    }

    void validate() const {
        if (e0_.size() != e1_.size()) throw ModelInvalid("readout model: e0 and e1 lengths differ");
        for (std::size_t q = 0; q < e0_.size(); ++q) {
            for (double e : {e0_[q], e1_[q]}) {
                if (!(e >= 0.0 && e < 0.5)) {
                    throw ModelInvalid("readout error " + std::to_string(e) + " on qubit " +
                                       std::to_string(q) + " outside [0, 0.5)");
                }
            }
            if (e0_[q] + e1_[q] >= 1.0) {
                throw ModelInvalid("confusion matrix of qubit " + std::to_string(q) + " is singular");
            }
        }
    }

    void check_size(std::size_t n) const {
        if (num_qubits() != n) {
            throw InvalidArgument("readout model covers " + std::to_string(num_qubits()) +
                                  " qubits, register has " + std::to_string(n));
        }
    }

private:
    std::vector<double> e0_, e1_;
};

/// Flips each bit independently: 0 -> 1 with e0, 1 -> 0 with e1.
[[nodiscard]] inline std::vector<Bitstring> apply_readout_error(std::vector<Bitstring> samples,
                                                               const ReadoutModel &m, Engine &eng) {
    if (m.is_ideal()) return samples;
    const std::size_t n = m.num_qubits();
    for (auto &s : samples) {
        for (std::size_t q = 0; q < n; ++q) {
            const bool one = (s >> q) & 1U;
            const double p = one ? m.e1(q) : m.e0(q);
            if (uniform01(eng) < p) s ^= Bitstring{1} << q;
        }
    }
    return samples;
}

/// A diagonal observable that factorizes over qubits: O(s) = prod_q w[q][s_q].
using ProductWeights = std::vector<std::array<double, 2>>;

[[nodiscard]] inline ProductWeights parity_weights(std::size_t n) {
    return ProductWeights(n, {1.0, -1.0});
}

[[nodiscard]] inline ProductWeights ground_indicator_weights(std::size_t n) {
    return ProductWeights(n, {1.0, 0.0});
}

/// Weights whose ideal expectation equals the expectation of `o` after the
/// readout channel: A^T o with A = [[1-e0, e1], [e0, 1-e1]].
[[nodiscard]] inline ProductWeights noisy_weights(const ReadoutModel &m, const ProductWeights &o) {
    m.check_size(o.size());
    ProductWeights w(o.size());
    for (std::size_t q = 0; q < o.size(); ++q) {
        const double e0 = m.e0(q), e1 = m.e1(q);
        w[q] = {(1.0 - e0) * o[q][0] + e0 * o[q][1], e1 * o[q][0] + (1.0 - e1) * o[q][1]};
    }
    return w;
}

/// (A^{-1})^T o per qubit.
[[nodiscard]] inline ProductWeights mitigation_weights(const ReadoutModel &m, const ProductWeights &o) {
    m.check_size(o.size());
    m.validate();
    ProductWeights w(o.size());
    for (std::size_t q = 0; q < o.size(); ++q) {
        const double e0 = m.e0(q), e1 = m.e1(q);
        const double det = 1.0 - e0 - e1;
        // A^{-1} = [[1-e1, -e1], [-e0, 1-e0]] / det
        w[q] = {((1.0 - e1) * o[q][0] - e0 * o[q][1]) / det,
                (-e1 * o[q][0] + (1.0 - e0) * o[q][1]) / det};
    }
    return w;
}

/// sum_s p(s) prod_q w[q][s_q], contracting one qubit at a time.
[[nodiscard]] inline double product_expectation(std::span<const double> probs, const ProductWeights &w) {
    const std::size_t n = w.size();
    if (probs.size() != (std::size_t{1} << n)) throw InvalidArgument("probability vector size mismatch");
    std::vector<double> v(probs.begin(), probs.end());
    std::size_t len = v.size();
    for (std::size_t q = n; q-- > 0;) {
        len >>= 1;
        for (std::size_t j = 0; j < len; ++j) v[j] = w[q][0] * v[j] + w[q][1] * v[j + len];
    }
    return v[0];
}

struct ShotEstimate {
    double value = 0.0;
    double std = 0.0;
    std::size_t shots = 0;
};

/// Mean of prod_q w[q][s_q] over samples with the standard error of the mean.
[[nodiscard]] inline ShotEstimate per_shot_mean(std::span<const Bitstring> samples, const ProductWeights &w) {
    if (samples.empty()) throw InvalidArgument("no samples");
    double sum = 0.0, sum2 = 0.0;
    for (auto s : samples) {
        double x = 1.0;
        for (std::size_t q = 0; q < w.size() && x != 0.0; ++q) x *= w[q][(s >> q) & 1U];
        sum += x;
        sum2 += x * x;
    }
    const double m = static_cast<double>(samples.size());
    const double mean = sum / m;
    const double var = samples.size() > 1 ? std::max(0.0, (sum2 - m * mean * mean) / (m - 1.0)) : 0.0;
    return {mean, std::sqrt(var / m), samples.size()};
}

/// Per-shot tensor-product readout correction of a factorizing observable.
[[nodiscard]] inline ShotEstimate mitigate_readout(std::span<const Bitstring> samples, const ReadoutModel &m,
                                                   const ProductWeights &observable) {
    return per_shot_mean(samples, mitigation_weights(m, observable));
}

} // namespace bellvqc::measure
