#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "bellvqc/bell/bounds.hpp"
#include "bellvqc/bell/models.hpp"
#include "bellvqc/measure/extract.hpp"
#include "bellvqc/qsim/dense.hpp"
#include "bellvqc/vqc/gradient.hpp"
#include "bellvqc/vqc/observable.hpp"

namespace bellvqc::cli {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace verify_detail {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

/// P_a on qubit a and P_b on qubit b, identity elsewhere.
inline qsim::DenseMatrix two_site(std::size_t n, std::size_t a, std::size_t b, char pa, char pb) {
    std::vector<qsim::DenseMatrix> f(n, qsim::DenseMatrix::Identity(2, 2));
    f[a] = qsim::pauli_matrix(pa);
    f[b] = qsim::pauli_matrix(pb);
    return qsim::tensor_product(f);
}

inline qsim::DenseMatrix ghz_closed_form(std::size_t n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    qsim::DenseMatrix m = qsim::DenseMatrix::Zero(dim, dim);
    const double s = std::pow(2.0, (static_cast<double>(n) - 1.0) / 2.0);
    m(0, dim - 1) = s;
    m(dim - 1, 0) = s;
    return m;
}

inline qsim::Circuit random_circuit(std::size_t n, std::size_t gates, Engine &eng) {
    using qsim::Angle;
    namespace g = qsim::gates;
    qsim::Circuit c(n);
    auto pick = [&](std::size_t k) { return static_cast<std::size_t>(eng() % k); };
    for (std::size_t i = 0; i < gates; ++i) {
        const auto q = pick(n);
        switch (pick(n > 1 ? 6 : 4)) {
        case 0: c.add(g::h(q)); break;
        case 1: c.add(g::rx(q, Angle::param(c.new_param()))); break;
        case 2: c.add(g::rz(q, Angle::param(c.new_param()))); break;
        case 3: {
            const auto t = c.new_param(), p = c.new_param(), l = c.new_param();
            c.add(g::u3(q, Angle::param(t), Angle::param(p), Angle::param(l)));
            break;
        }
        default: {
            auto r = pick(n - 1);
            if (r >= q) ++r;
            c.add(pick(2) ? g::cnot(q, r) : g::cz(q, r));
        }
        }
    }
    if (c.num_params() == 0) c.add(g::rz(0, Angle::param(c.new_param())));
    return c;
}

inline qsim::PauliSum random_pauli_sum(std::size_t n, std::size_t terms, Engine &eng) {
    constexpr char letters[] = {'I', 'X', 'Y', 'Z'};
    qsim::PauliSum h(n);
    for (std::size_t t = 0; t < terms; ++t) {
        std::string ops(n, 'I');
        for (auto &ch : ops) ch = letters[eng() % 4];
        h.add(2.0 * uniform01(eng) - 1.0, ops);
    }
    return h;
}

inline std::vector<double> random_params(std::size_t k, Engine &eng) {
    std::vector<double> p(k);
    for (auto &x : p) x = (2.0 * uniform01(eng) - 1.0) * std::numbers::pi;
    return p;
}

} // namespace verify_detail

/// Max elementwise deviation between the operator built from the model's
/// settings and `expected`.
[[nodiscard]] inline Check check_operator_equality(std::string name, const bell::BellModel &m,
                                                   const qsim::DenseMatrix &expected, double tol = 1e-9) {
    const auto built = bell::bell_operator_from_expression(m.expression, m.settings);
    if (built.rows() != expected.rows()) return {std::move(name), false, "dimension mismatch"};
    const double dev = (built - expected).cwiseAbs().maxCoeff();
    return {std::move(name), dev <= tol, "max deviation " + verify_detail::fmt(dev)};
}

[[nodiscard]] inline Check check_bound(std::string name, const bell::BellExpression &e, double expected) {
    const double bf = bell::lhv_bound_bruteforce(e);
    const double dev = std::abs(bf - expected);
    return {std::move(name), dev <= 1e-9, "brute force " + verify_detail::fmt(bf) + " vs " + verify_detail::fmt(expected)};
}

[[nodiscard]] inline std::vector<Check> operator_checks() {
    using verify_detail::two_site;
    std::vector<Check> out;
    for (char color : bell::link_colors) {
        for (double eps : {0.9, -0.3}) {
            const auto lat = bell::single_link(color);
            const double j = bell::honeycomb_coupling(color, eps);
            const qsim::DenseMatrix expected =
                std::numbers::sqrt2 * j * (two_site(2, 0, 1, 'X', 'X') + two_site(2, 0, 1, 'Z', 'Z'));
            out.push_back(check_operator_equality(std::string("honeycomb ") + color + " link, eps " +
                                                      verify_detail::fmt(eps),
                                                  {bell::build_honeycomb_expression(lat, eps),
                                                   bell::honeycomb_settings(lat)},
                                                  expected));
        }
    }
    for (double delta : {2.0, 0.5, -1.0}) {
        const double eps = 0.95;
        qsim::DenseMatrix expected = qsim::DenseMatrix::Zero(8, 8);
        for (std::size_t i = 1; i < 3; ++i) {
            const double j = bell::chain_coupling(i, eps);
            expected += j * (two_site(3, i - 1, i, 'X', 'X') + two_site(3, i - 1, i, 'Y', 'Y') +
                             delta * two_site(3, i - 1, i, 'Z', 'Z'));
        }
        out.push_back(check_operator_equality("chain links, delta " + verify_detail::fmt(delta),
                                              {bell::build_chain_expression(3, delta, eps), bell::chain_settings(3)},
                                              expected));
    }
    for (std::size_t n = 2; n <= 6; ++n) {
        const auto expected = verify_detail::ghz_closed_form(n);
        out.push_back(check_operator_equality("svetlichny n=" + std::to_string(n), bell::build_svetlichny(n), expected));
        out.push_back(check_operator_equality("mermin n=" + std::to_string(n), bell::build_mermin(n), expected));
    }
    return out;
}

[[nodiscard]] inline std::vector<Check> bound_checks() {
    std::vector<Check> out;
    out.push_back(check_bound("chsh LHV bound", bell::build_chsh().expression, -2.0));
    out.push_back(check_bound("gisin LHV bound", bell::build_gisin().expression, -6.0));
    for (std::size_t n : {3u, 5u}) {
        out.push_back(check_bound("chain n=" + std::to_string(n) + " LHV bound",
                                  bell::build_chain_expression(n, 2.0, 0.95), bell::classical_bound_chain(n, 2.0)));
    }
    const auto patch = bell::brick_wall(2, 3);
    const auto hc = bell::build_honeycomb_expression(patch, 0.9);
    out.push_back(check_bound("honeycomb 2x3 LHV bound", hc, hc.classical_bound()));
    for (std::size_t n = 2; n <= 8; ++n) {
        out.push_back(check_bound("svetlichny n=" + std::to_string(n) + " LHV bound", bell::build_svetlichny(n).expression,
                                  bell::svetlichny_classical_bound(n)));
        out.push_back(check_bound("mermin n=" + std::to_string(n) + " LHV bound", bell::build_mermin(n).expression,
                                  bell::mermin_classical_bound(n)));
    }
    return out;
}

/// Parameter shift against a central difference with step 1e-5 on random
/// circuits of 1..max_qubits qubits.
[[nodiscard]] inline Check gradient_check(std::size_t circuits, std::size_t max_qubits, std::uint64_t seed) {
    auto eng = make_engine({seed, "verify-gradient"});
    double worst = 0.0;
    for (std::size_t i = 0; i < circuits; ++i) {
        const std::size_t n = 1 + eng() % max_qubits;
        const auto c = verify_detail::random_circuit(n, 4 + eng() % 14, eng);
        const auto h = verify_detail::random_pauli_sum(n, 1 + eng() % 6, eng);
        auto p = verify_detail::random_params(c.num_params(), eng);
        const auto g = vqc::parameter_shift_gradient(c, vqc::exact_evaluator(h), p);
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double s = p[k];
            p[k] = s + 1e-5;
            const double up = vqc::expectation(qsim::prepare(c, p), h);
            p[k] = s - 1e-5;
            const double down = vqc::expectation(qsim::prepare(c, p), h);
            p[k] = s;
            worst = std::max(worst, std::abs(g.grad[k] - (up - down) / 2e-5));
        }
    }
    return {"parameter shift vs finite difference", worst <= 1e-6, "max deviation " + verify_detail::fmt(worst)};
}

/// Exact parity and MQC extraction reproduce the antidiagonal coherence of
/// random states.
[[nodiscard]] inline std::vector<Check> fourier_checks(std::uint64_t seed) {
    auto eng = make_engine({seed, "verify-fourier"});
    double parity_dev = 0.0, mqc_dev = 0.0;
    for (std::size_t n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto c = verify_detail::random_circuit(n, 3 * n, eng);
            const auto bound = c.bind(verify_detail::random_params(c.num_params(), eng));
            const auto s = qsim::prepare(bound, {});
            const auto direct = qsim::antidiagonal_coherence(s);
            const auto pt = measure::parity_signals(s, measure::parity_settings(n), {}, seed);
            parity_dev = std::max(parity_dev, std::abs(measure::extract_coherence_parity(pt, n).value - direct));
            const auto mt = measure::mqc_signals(s, bound.inverse(), measure::mqc_settings(n), {}, seed);
            mqc_dev = std::max(mqc_dev, std::abs(measure::extract_coherence_mqc(mt, n).value.real() - std::abs(direct)));
        }
    }
    return {{"parity Fourier extraction is exact", parity_dev <= 1e-9, "max deviation " + verify_detail::fmt(parity_dev)},
            {"MQC extraction is exact", mqc_dev <= 1e-9, "max deviation " + verify_detail::fmt(mqc_dev)}};
}

/// Exact-mode readout degradation of the ideal GHZ signal: (1-2e)^n for
/// parity, sqrt((1-e)^(n-1) (1-2e)) for MQC, and full recovery when mitigated.
[[nodiscard]] inline std::vector<Check> degradation_checks() {
    const double e = 0.0085;
    double pdev = 0.0, mdev = 0.0, rdev = 0.0;
    for (std::size_t n : {4u, 8u, 12u}) {
        qsim::Circuit c(n);
        c.add(qsim::gates::u3(0, std::numbers::pi / 2, std::numbers::pi, 0.0));
        for (std::size_t q = 1; q < n; ++q) c.add(qsim::gates::cnot(q - 1, q));
        const auto s = qsim::prepare(c, {});
        const auto inv = c.inverse();
        const auto ro = measure::ReadoutModel::symmetric(n, e);
        const measure::PointOptions noisy{0, ro, false}, mitigated{0, ro, true};
        const double nn = static_cast<double>(n);

        const auto gam = measure::parity_settings(n);
        const auto ideal_p = measure::extract_coherence_parity(measure::parity_signals(s, gam, {}, 0), n).value;
        const auto noisy_p = measure::extract_coherence_parity(measure::parity_signals(s, gam, noisy, 0), n).value;
        const auto mit_p = measure::extract_coherence_parity(measure::parity_signals(s, gam, mitigated, 0), n).value;
        pdev = std::max(pdev, std::abs(noisy_p.real() / ideal_p.real() - std::pow(1 - 2 * e, nn)));

        const auto phi = measure::mqc_settings(n);
        const double ideal_m = measure::extract_coherence_mqc(measure::mqc_signals(s, inv, phi, {}, 0), n).value.real();
        const double noisy_m = measure::extract_coherence_mqc(measure::mqc_signals(s, inv, phi, noisy, 0), n).value.real();
        const double mit_m = measure::extract_coherence_mqc(measure::mqc_signals(s, inv, phi, mitigated, 0), n).value.real();
        mdev = std::max(mdev, std::abs(noisy_m / ideal_m - std::sqrt(std::pow(1 - e, nn - 1) * (1 - 2 * e))));
        rdev = std::max({rdev, std::abs(mit_p - ideal_p), std::abs(mit_m - ideal_m)});
    }
    return {{"parity readout degradation (1-2e)^n", pdev <= 1e-9, "max deviation " + verify_detail::fmt(pdev)},
            {"MQC readout degradation", mdev <= 1e-9, "max deviation " + verify_detail::fmt(mdev)},
            {"mitigation restores the ideal signal", rdev <= 1e-9, "max deviation " + verify_detail::fmt(rdev)}};
}

[[nodiscard]] inline Check readout_precondition_check() {
    try {
        measure::ReadoutModel::uniform(2, 0.45, 0.6).validate();
    } catch (const ModelInvalid &) {
        return {"readout model with e0 + e1 >= 1 is rejected", true, "ModelInvalid raised"};
    } catch (const std::exception &ex) {
        return {"readout model with e0 + e1 >= 1 is rejected", false, std::string("wrong error: ") + ex.what()};
    }
    return {"readout model with e0 + e1 >= 1 is rejected", false, "accepted"};
}

[[nodiscard]] inline std::vector<Check> run_verify(std::ostream *log, std::uint64_t seed = 0) {
    std::vector<Check> all;
    auto append = [&](std::vector<Check> v) {
        for (auto &c : v) {
            if (log) *log << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
            all.push_back(std::move(c));
        }
    };
    append(operator_checks());
    append(bound_checks());
    append({gradient_check(30, 6, seed)});
    append(fourier_checks(seed));
    append(degradation_checks());
    append({readout_precondition_check()});
    return all;
}

} // namespace bellvqc::cli
