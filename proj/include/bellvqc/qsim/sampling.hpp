#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "bellvqc/qsim/state_vector.hpp"
#include "bellvqc/rng.hpp"

namespace bellvqc::qsim {

using Bitstring = std::uint64_t; // bit q = outcome of qubit q

/// Draws `shots` i.i.d. basis states from a probability vector.
[[nodiscard]] inline std::vector<Bitstring> sample_from_probabilities(
    const std::vector<double> &probs, std::size_t shots, Engine &eng) {
    if (shots == 0) throw InvalidArgument("shots must be >= 1");
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    // Guard the tail against round-off so every draw lands on a nonzero entry.
    std::size_t last = probs.size();
    while (last > 0 && probs[last - 1] == 0.0) --last;
    if (last == 0) throw NumericalError("cannot sample from an all-zero distribution");

    std::vector<Bitstring> out;
    out.reserve(shots);
    for (std::size_t k = 0; k < shots; ++k) {
        const double u = uniform01(eng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.begin() + static_cast<std::ptrdiff_t>(last), u);
        auto idx = static_cast<std::size_t>(it - cdf.begin());
        if (idx >= last) idx = last - 1;
        // Skip zero-probability entries that share a cdf value with their
        // predecessor.
        while (probs[idx] == 0.0 && idx + 1 < last) ++idx;
        out.push_back(static_cast<Bitstring>(idx));
    }
    return out;
}

[[nodiscard]] inline std::vector<Bitstring> sample_bitstrings(const StateVector &state,
                                                              std::size_t shots, Engine &eng) {
    return sample_from_probabilities(state.probabilities(), shots, eng);
}

[[nodiscard]] inline std::vector<Bitstring> sample_bitstrings(const StateVector &state,
                                                              std::size_t shots,
                                                              const StreamId &stream) {
    auto eng = make_engine(stream);
    return sample_bitstrings(state, shots, eng);
}

/// Order-independent aggregate of a sample.
[[nodiscard]] inline std::map<Bitstring, std::size_t> histogram(const std::vector<Bitstring> &s) {
    std::map<Bitstring, std::size_t> h;
    for (auto b : s) ++h[b];
    return h;
}

} // namespace bellvqc::qsim
