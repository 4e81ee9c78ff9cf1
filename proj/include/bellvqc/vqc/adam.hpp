#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "bellvqc/error.hpp"

namespace bellvqc::vqc {

struct AdamConfig {
    double learning_rate = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct OptimizerState {
    std::size_t t = 0;
    std::vector<double> m;
    std::vector<double> v;
    AdamConfig config;

    OptimizerState() = default;
    OptimizerState(std::size_t num_params, AdamConfig cfg)
        : m(num_params, 0.0), v(num_params, 0.0), config(cfg) {}
};

/// One bias-corrected Adam update of `params` in place.
inline void adam_step(OptimizerState &s, std::span<const double> grad, std::span<double> params) {
    if (grad.size() != params.size() || s.m.size() != params.size()) {
        throw InvalidArgument("Adam: gradient, parameter and moment lengths differ");
    }
    for (std::size_t k = 0; k < grad.size(); ++k) {
        if (!std::isfinite(grad[k])) {
            throw NumericalError("training aborted: gradient component " + std::to_string(k) +
                                 " is " + std::to_string(grad[k]) + " at step " +
                                 std::to_string(s.t + 1));
        }
    }
    ++s.t;
    const auto &c = s.config;
    const double b1t = 1.0 - std::pow(c.beta1, static_cast<double>(s.t));
    const double b2t = 1.0 - std::pow(c.beta2, static_cast<double>(s.t));
    for (std::size_t k = 0; k < grad.size(); ++k) {
        s.m[k] = c.beta1 * s.m[k] + (1.0 - c.beta1) * grad[k];
        s.v[k] = c.beta2 * s.v[k] + (1.0 - c.beta2) * grad[k] * grad[k];
        const double mh = s.m[k] / b1t;
        const double vh = s.v[k] / b2t;
        params[k] -= c.learning_rate * mh / (std::sqrt(vh) + c.epsilon);
    }
}

} // namespace bellvqc::vqc
