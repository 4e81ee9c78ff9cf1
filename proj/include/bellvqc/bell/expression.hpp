#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bellvqc/error.hpp"
#include "bellvqc/qsim/dense.hpp"
#include "bellvqc/qsim/pauli_sum.hpp"

namespace bellvqc::bell {

/// Marks a party that does not take part in a correlator.
inline constexpr std::int8_t absent = -1;

/// Full-correlator Bell expression sum_t w_t <prod_i A_{i, x_i(t)}>.
///
/// Terms are kept in flat storage (one int8 per party) so the 2^24-term
/// Svetlichny expression fits in memory.
class BellExpression {
public:
    BellExpression() = default;
    BellExpression(std::string name, std::vector<std::size_t> settings_per_party)
        : name_(std::move(name)), settings_(std::move(settings_per_party)) {
        if (settings_.empty()) throw InvalidArgument("Bell expression needs at least one party");
        for (auto m : settings_) {
            if (m == 0 || m > 127) throw InvalidArgument("settings per party must be in [1, 127]");
        }
    }

    [[nodiscard]] const std::string &name() const noexcept { return name_; }
    [[nodiscard]] std::size_t num_parties() const noexcept { return settings_.size(); }
    [[nodiscard]] const std::vector<std::size_t> &settings_per_party() const noexcept {
        return settings_;
    }
    [[nodiscard]] std::size_t num_terms() const noexcept { return weights_.size(); }
    [[nodiscard]] double weight(std::size_t t) const { return weights_[t]; }
    [[nodiscard]] std::span<const std::int8_t> setting(std::size_t t) const {
        return {tuples_.data() + t * num_parties(), num_parties()};
    }

    [[nodiscard]] double classical_bound() const noexcept { return classical_bound_; }
    void set_classical_bound(double b) { classical_bound_ = b; }

    /// Appends one correlator. `x[i]` is party i's setting or `absent`.
    void add(std::span<const std::int8_t> x, double w) {
        if (x.size() != num_parties()) throw InvalidArgument("setting tuple has wrong length");
        if (!std::isfinite(w)) throw InvalidArgument("non-finite Bell coefficient");
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] != absent && (x[i] < 0 || static_cast<std::size_t>(x[i]) >= settings_[i])) {
                throw InvalidArgument("setting index out of range for party " + std::to_string(i));
            }
        }
        tuples_.insert(tuples_.end(), x.begin(), x.end());
        weights_.push_back(w);
    }

    void add(std::initializer_list<std::pair<std::size_t, int>> sparse, double w) {
        std::vector<std::int8_t> x(num_parties(), absent);
        for (auto [party, s] : sparse) {
            if (party >= num_parties()) throw InvalidArgument("party index out of range");
            x[party] = static_cast<std::int8_t>(s);
        }
        add(x, w);
    }

    void reserve(std::size_t terms) {
        tuples_.reserve(terms * num_parties());
        weights_.reserve(terms);
    }

private:
    std::string name_;
    std::vector<std::size_t> settings_;
    std::vector<std::int8_t> tuples_;
    std::vector<double> weights_;
    double classical_bound_ = 0.0;
};

using Bloch = std::array<double, 3>; // (x, y, z) Pauli coefficients

/// Per party and setting, the observable n . sigma with |n| = 1.
class MeasurementAssignment {
public:
    MeasurementAssignment() = default;
    explicit MeasurementAssignment(std::vector<std::vector<Bloch>> obs) : obs_(std::move(obs)) {
        for (std::size_t i = 0; i < obs_.size(); ++i) {
            for (const auto &n : obs_[i]) {
                const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
                if (!(std::abs(len - 1.0) <= 1e-12)) {
                    throw InvalidArgument("observable for party " + std::to_string(i) +
                                          " is not a unit Bloch vector");
                }
            }
        }
    }

    [[nodiscard]] std::size_t num_parties() const noexcept { return obs_.size(); }
    [[nodiscard]] const std::vector<Bloch> &party(std::size_t i) const { return obs_.at(i); }

    void check_matches(const BellExpression &e) const {
        if (obs_.size() != e.num_parties()) {
            throw InvalidArgument("measurement assignment covers " + std::to_string(obs_.size()) +
                                  " parties, expression has " + std::to_string(e.num_parties()));
        }
        for (std::size_t i = 0; i < obs_.size(); ++i) {
            if (obs_[i].size() != e.settings_per_party()[i]) {
                throw InvalidArgument("party " + std::to_string(i) + " has " +
                                      std::to_string(obs_[i].size()) + " observables, expected " +
                                      std::to_string(e.settings_per_party()[i]));
            }
        }
    }

private:
    std::vector<std::vector<Bloch>> obs_;
};

[[nodiscard]] inline qsim::DenseMatrix observable_matrix(const Bloch &n) {
    using qsim::cplx;
    qsim::DenseMatrix m(2, 2);
    m << n[2], cplx(n[0], -n[1]), cplx(n[0], n[1]), -n[2];
    return m;
}

/// Dense Bell operator sum_t w_t (x)_i A_{i, x_i}. Built directly from 2x2
/// Kronecker factors, independent of the Pauli-string path.
[[nodiscard]] inline qsim::DenseMatrix bell_operator_from_expression(
    const BellExpression &expr, const MeasurementAssignment &meas) {
    meas.check_matches(expr);
    const auto n = expr.num_parties();
    if (n > qsim::max_dense_qubits) {
        throw CapacityError("dense Bell operator limited to " +
                            std::to_string(qsim::max_dense_qubits) + " parties");
    }
    const Eigen::Index dim = Eigen::Index{1} << n;
    qsim::DenseMatrix out = qsim::DenseMatrix::Zero(dim, dim);
    std::vector<qsim::DenseMatrix> factors(n);
    for (std::size_t t = 0; t < expr.num_terms(); ++t) {
        const auto x = expr.setting(t);
        for (std::size_t i = 0; i < n; ++i) {
            factors[i] = x[i] == absent ? qsim::DenseMatrix::Identity(2, 2)
                                        : observable_matrix(meas.party(i)[x[i]]);
        }
        out += expr.weight(t) * qsim::tensor_product(factors);
    }
    return out;
}

/// Bell operator as a merged Pauli sum; coefficients below `tol` are dropped.
[[nodiscard]] inline qsim::PauliSum bell_operator_pauli(const BellExpression &expr,
                                                        const MeasurementAssignment &meas,
                                                        double tol = 1e-13) {
    meas.check_matches(expr);
    const auto n = expr.num_parties();
    qsim::PauliSum raw(n);
    constexpr std::array<char, 3> letters{'X', 'Y', 'Z'};
    std::string ops(n, 'I');
    std::vector<std::size_t> present;
    for (std::size_t t = 0; t < expr.num_terms(); ++t) {
        const auto x = expr.setting(t);
        present.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] != absent) present.push_back(i);
        }
        if (present.size() > 16) throw CapacityError("correlator too long for Pauli expansion");
        // Expand prod_i (n_x X + n_y Y + n_z Z) over all 3^k letter choices,
        // skipping zero components.
        std::vector<std::size_t> choice(present.size(), 0);
        for (;;) {
            double w = expr.weight(t);
            std::fill(ops.begin(), ops.end(), 'I');
            for (std::size_t k = 0; k < present.size(); ++k) {
                const auto i = present[k];
                w *= meas.party(i)[x[i]][choice[k]];
                ops[i] = letters[choice[k]];
            }
            if (w != 0.0) raw.add(w, ops);
            std::size_t k = 0;
            while (k < choice.size() && ++choice[k] == 3) choice[k++] = 0;
            if (k == choice.size()) break;
        }
    }
    return raw.simplified(tol);
}

} // namespace bellvqc::bell
