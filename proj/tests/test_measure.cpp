#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "bellvqc/bell/models.hpp"
#include "bellvqc/measure/estimator.hpp"
#include "bellvqc/vqc/train.hpp"
#include "oracles.hpp"

using namespace bellvqc;
using namespace bellvqc::measure;
using Catch::Approx;
using std::numbers::pi;

namespace {

/// (|0...0> + e^{i a}|1...1>)/sqrt 2; a = pi gives GHZ^-.
qsim::Circuit ghz_circuit(std::size_t n, double a = pi) {
    qsim::Circuit c(n);
    c.add(qsim::gates::u3(0, pi / 2, a, 0.0));
    for (std::size_t q = 1; q < n; ++q) c.add(qsim::gates::cnot(q - 1, q));
    return c;
}

/// prod_j (cos g X_j + sin g Y_j) expanded into Pauli strings.
qsim::PauliSum parity_operator(std::size_t n, double g) {
    qsim::PauliSum h(n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::string s(n, 'X');
        double c = 1.0;
        for (std::size_t q = 0; q < n; ++q) {
            if ((mask >> q) & 1U) {
                s[q] = 'Y';
                c *= std::sin(g);
            } else {
                c *= std::cos(g);
            }
        }
        h.add(c, s);
    }
    return h;
}

/// |<psi| RZ(phi)^n RX(pi)^n |psi>|^2 with dense matrices.
double mqc_oracle(const oracle::Vec &psi, std::size_t n, double phi) {
    using oracle::m2;
    const auto x = m2(0.0, {0, -1}, {0, -1}, 0.0);
    const auto z = m2(std::polar(1.0, -phi / 2), 0.0, 0.0, std::polar(1.0, phi / 2));
    oracle::Vec v = psi;
    for (std::size_t q = 0; q < n; ++q) v = oracle::embed_1q(z * x, q, n) * v;
    return std::norm(psi.dot(v));
}

SignalTable table_of(Method m, std::size_t n, std::vector<double> settings, std::vector<double> values) {
    SignalTable t;
    t.method = m;
    t.num_qubits = n;
    t.settings = std::move(settings);
    t.values = std::move(values);
    t.stds.assign(t.settings.size(), 0.0);
    t.shots.assign(t.settings.size(), 0);
    return t;
}

} // namespace

TEST_CASE("setting grids and shot schedule", "[measure][settings]") {
    auto g2 = parity_settings(2);
    REQUIRE(g2.size() == 3);
    CHECK(g2[0] == Approx(-pi / 2));
    CHECK(g2[1] == Approx(-pi / 6));
    CHECK(g2[2] == Approx(pi / 6));
    CHECK(parity_settings(8).size() == 9);
    CHECK(parity_settings(24).size() == 25);
    CHECK(parity_settings(8, 81).size() == 81);
    CHECK(mqc_settings(2).size() == 6);
    CHECK(mqc_settings(24).size() == 50);
    CHECK(mqc_settings(3)[1] == Approx(pi / 4));
    CHECK_THROWS_AS(parity_settings(1), InvalidArgument);
    CHECK_THROWS_AS(mqc_settings(1), InvalidArgument);

    CHECK(shots_schedule(2) == 900);
    CHECK(shots_schedule(12) == 7200);
    CHECK(shots_schedule(24) == 30000);
    CHECK(shots_schedule(8) == 3600);
    CHECK_THROWS_AS(shots_schedule(5), ConfigError);
    CHECK_THROWS_AS(shots_schedule(26), ConfigError);
}

TEST_CASE("readout model validation", "[measure][readout]") {
    CHECK_NOTHROW(ReadoutModel::symmetric(3, 0.49));
    CHECK_THROWS_AS(ReadoutModel::symmetric(3, 0.5), ModelInvalid);
    CHECK_THROWS_AS(ReadoutModel::uniform(2, -0.01, 0.0), ModelInvalid);
    CHECK_THROWS_AS(ReadoutModel({0.1}, {0.1, 0.2}), ModelInvalid);
    CHECK_THROWS_AS(ReadoutModel::uniform(2, std::nan(""), 0.0), ModelInvalid);
    CHECK(ReadoutModel::ideal(4).is_ideal());
}

TEST_CASE("readout channel", "[measure][readout]") {
    auto eng = make_engine({1, "readout"});
    std::vector<Bitstring> s{0b101, 0b011, 0b000};
    CHECK(apply_readout_error(s, ReadoutModel::ideal(3), eng) == s);

    const double e0 = 0.5 - 0.05;
    const std::size_t m = 1'000'000;
    auto flipped = apply_readout_error(std::vector<Bitstring>(m, 0), ReadoutModel::uniform(2, e0, 0.0), eng);
    for (std::size_t q = 0; q < 2; ++q) {
        std::size_t ones = 0;
        for (auto b : flipped) ones += (b >> q) & 1U;
        const double sigma = std::sqrt(e0 * (1 - e0) / m);
        CHECK(std::abs(static_cast<double>(ones) / m - e0) < 3 * sigma);
    }
    // 1 -> 0 only with e1
    auto ones = apply_readout_error(std::vector<Bitstring>(1000, 0b1), ReadoutModel::uniform(1, 0.3, 0.0), eng);
    for (auto b : ones) CHECK(b == 0b1);
}

TEST_CASE("mitigation weights invert the channel", "[measure][readout][property]") {
    auto eng = make_engine({2, "mitigation"});
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + eng() % 5;
        std::vector<double> e0(n), e1(n);
        ProductWeights o(n);
        for (std::size_t q = 0; q < n; ++q) {
            e0[q] = 0.45 * uniform01(eng);
            e1[q] = 0.45 * uniform01(eng);
            o[q] = {2 * uniform01(eng) - 1, 2 * uniform01(eng) - 1};
        }
        ReadoutModel m(e0, e1);
        const auto noisy = noisy_weights(m, o);
        const auto fixed = mitigation_weights(m, noisy);
        for (std::size_t q = 0; q < n; ++q) {
            CHECK(fixed[q][0] == Approx(o[q][0]).margin(1e-12));
            CHECK(fixed[q][1] == Approx(o[q][1]).margin(1e-12));
        }
        std::vector<double> probs(std::size_t{1} << n);
        double tot = 0.0;
        for (auto &p : probs) tot += (p = uniform01(eng));
        for (auto &p : probs) p /= tot;
        double direct = 0.0;
        for (std::size_t s = 0; s < probs.size(); ++s) {
            double w = 1.0;
            for (std::size_t q = 0; q < n; ++q) w *= o[q][(s >> q) & 1U];
            direct += probs[s] * w;
        }
        CHECK(product_expectation(probs, o) == Approx(direct).margin(1e-12));
    }
    // e = 0: corrected equals raw
    std::vector<Bitstring> s{0b01, 0b10, 0b11, 0b00, 0b00};
    CHECK(mitigate_readout(s, ReadoutModel::ideal(2), parity_weights(2)).value ==
          per_shot_mean(s, parity_weights(2)).value);
}

TEST_CASE("parity rotation measures the X-Y product", "[measure][parity][property]") {
    auto eng = make_engine({3, "parity-oracle"});
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + eng() % 4;
        auto c = oracle::random_circuit(n, 12, eng);
        const auto p = oracle::random_params(c.num_params(), eng);
        const auto psi = oracle::run_dense(c, p);
        const double g = (2 * uniform01(eng) - 1) * pi;
        auto e = make_engine({0, "unused"});
        CHECK(measure_parity(c, p, g, {}, e).value ==
              Approx(oracle::expect_dense(psi, parity_operator(n, g))).margin(1e-10));
    }
}

TEST_CASE("parity examples", "[measure][parity]") {
    auto eng = make_engine({4, "parity"});
    for (std::size_t n : {2u, 3u, 6u}) {
        auto c = ghz_circuit(n);
        for (double g : {-1.2, -0.3, 0.0, 0.4, 1.5}) {
            CHECK(measure_parity(c, {}, g, {}, eng).value == Approx(-std::cos(n * g)).margin(1e-12));
        }
    }
    qsim::Circuit zero(4);
    for (double g : {-1.0, 0.2, pi / 2}) CHECK(std::abs(measure_parity(zero, {}, g, {}, eng).value) < 1e-12);
    auto shot = measure_parity(zero, {}, pi / 2, {.shots = 20000}, eng);
    CHECK(std::abs(shot.value) < 3 * shot.std + 1e-12);
    CHECK(parity_std(0.5, 900) == Approx(1.0 / 30.0));
}

TEST_CASE("sparse parity grid extracts the coherence exactly", "[measure][parity][property]") {
    auto eng = make_engine({5, "sparse"});
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + eng() % 7;
        auto c = oracle::random_circuit(n, 15, eng);
        const auto p = oracle::random_params(c.num_params(), eng);
        const auto s = qsim::prepare(c, p);
        const auto want = qsim::antidiagonal_coherence(s);
        for (std::size_t ns : {n + 1, 10 * n + 1}) {
            const auto t = parity_signals(s, parity_settings(n, ns), {}, 0);
            const auto e = extract_coherence_parity(t, n);
            CHECK(std::abs(e.value - want) < 1e-9);
            CHECK(e.warnings.empty());
            CHECK(*e.energy == Approx(vqc::expectation(s, vqc::GhzOperator{n})).margin(1e-9));
        }
    }
}

TEST_CASE("parity extraction examples", "[measure][parity]") {
    for (std::size_t n : {2u, 5u, 8u, 13u}) {
        const auto g = parity_settings(n);
        std::vector<double> minus, plus, zero(g.size(), 0.0);
        for (double x : g) {
            minus.push_back(-std::cos(n * x));
            plus.push_back(std::cos(n * x));
        }
        auto em = extract_coherence_parity(table_of(Method::parity, n, g, minus), n);
        CHECK(std::abs(em.value - qsim::cplx(-0.5, 0.0)) < 1e-12);
        auto ep = extract_coherence_parity(table_of(Method::parity, n, g, plus), n);
        CHECK(*ep.energy == Approx(std::pow(2.0, (n - 1.0) / 2.0)).epsilon(1e-12));
        CHECK(std::abs(extract_coherence_parity(table_of(Method::parity, n, g, zero), n).value) == 0.0);
    }
    auto bad = table_of(Method::parity, 4, parity_settings(4), std::vector<double>(5, 0.0));
    bad.settings[2] += 1e-6;
    CHECK_THROWS_AS(extract_coherence_parity(bad, 4), InvalidArgument);
    bad.method = Method::mqc;
    CHECK_THROWS_AS(extract_coherence_parity(bad, 4), InvalidArgument);
    auto coarse = table_of(Method::parity, 6, parity_settings(6, 4), std::vector<double>(4, 0.0));
    CHECK_FALSE(extract_coherence_parity(coarse, 6).warnings.empty());
}

TEST_CASE("parity std weights each quadrature", "[measure][parity]") {
    auto t = table_of(Method::parity, 2, parity_settings(2), {0.1, 0.2, 0.3});
    t.stds = {0.1, 0.2, 0.3};
    auto e = extract_coherence_parity(t, 2);
    double vr = 0, vi = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        vr += std::pow(std::cos(2 * t.settings[k]) * t.stds[k] / 3, 2);
        vi += std::pow(std::sin(2 * t.settings[k]) * t.stds[k] / 3, 2);
    }
    CHECK(e.std == Approx(std::sqrt(vr)));
    CHECK(e.std_imag == Approx(std::sqrt(vi)));
    CHECK(e.energy_std == Approx(std::pow(2.0, 1.5) * e.std));
}

TEST_CASE("MQC echo matches the dense oracle", "[measure][mqc][property]") {
    auto eng = make_engine({6, "mqc-oracle"});
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + eng() % 4;
        auto c = oracle::random_circuit(n, 10, eng);
        const auto p = oracle::random_params(c.num_params(), eng);
        const auto psi = oracle::run_dense(c, p);
        const double phi = 2 * pi * uniform01(eng);
        auto e = make_engine({0, "unused"});
        CHECK(measure_mqc(c, p, phi, {}, e).value == Approx(mqc_oracle(psi, n, phi)).margin(1e-10));
    }
}

TEST_CASE("MQC examples", "[measure][mqc]") {
    auto eng = make_engine({7, "mqc"});
    for (std::size_t n : {2u, 4u, 7u}) {
        auto c = ghz_circuit(n);
        for (double phi : {0.0, 0.3, 1.1, 2.5}) {
            CHECK(measure_mqc(c, {}, phi, {}, eng).value == Approx((1 + std::cos(n * phi)) / 2).margin(1e-12));
        }
    }
    // identity preparation: the RX(pi) layer sends |0...0> to |1...1>, so K = 0
    qsim::Circuit id(3);
    for (double phi : {0.0, 1.0}) CHECK(measure_mqc(id, {}, phi, {}, eng).value == Approx(0.0).margin(1e-15));
}

TEST_CASE("MQC extraction", "[measure][mqc]") {
    for (std::size_t n : {2u, 6u, 11u}) {
        const auto ph = mqc_settings(n);
        std::vector<double> k, zero(ph.size(), 0.0);
        for (double x : ph) k.push_back((1 + std::cos(n * x)) / 2);
        auto e = extract_coherence_mqc(table_of(Method::mqc, n, ph, k), n);
        CHECK(e.value.real() == Approx(0.5).epsilon(1e-12));
        CHECK(extract_coherence_mqc(table_of(Method::mqc, n, ph, zero), n).value.real() == 0.0);
    }
    auto bad = table_of(Method::mqc, 3, mqc_settings(3), std::vector<double>(8, 0.5));
    bad.values[2] = 1.2;
    bad.stds.assign(8, 0.01);
    CHECK_THROWS_AS(extract_coherence_mqc(bad, 3), SignalsInconsistent);
    bad.stds[2] = 0.1;
    CHECK_NOTHROW(extract_coherence_mqc(bad, 3));

    // radicand below its std: floored std
    auto noise = table_of(Method::mqc, 3, mqc_settings(3), std::vector<double>(8, 0.0));
    noise.stds.assign(8, 0.05);
    auto fl = extract_coherence_mqc(noise, 3);
    CHECK(fl.value.real() == 0.0);
    CHECK(fl.std > 0.0);
    CHECK_FALSE(fl.warnings.empty());
    CHECK_THROWS_AS(extract_coherence_mqc(table_of(Method::mqc, 3, mqc_settings(4), std::vector<double>(10, 0.0)), 3),
                    InvalidArgument);
}

TEST_CASE("MQC magnitude equals parity magnitude", "[measure][mqc][property]") {
    auto eng = make_engine({8, "agree"});
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 2 + eng() % 5;
        auto c = oracle::random_circuit(n, 14, eng);
        const auto p = oracle::random_params(c.num_params(), eng);
        MeasureConfig cfg;
        cfg.method = Method::mqc;
        cfg.exact = true;
        auto r = measure_coherence(c, p, cfg);
        CHECK(r.mqc->value.real() == Approx(std::abs(r.parity.value)).margin(1e-9));
        CHECK(*r.mqc->energy == Approx(*r.parity.energy).margin(1e-8));
    }
}

TEST_CASE("readout degradation laws in exact mode", "[measure][readout]") {
    const double e = 0.0085;
    for (std::size_t n : {4u, 8u, 12u}) {
        MeasureConfig cfg;
        cfg.method = Method::mqc;
        cfg.exact = true;
        cfg.readout = ReadoutModel::symmetric(n, e);
        auto r = measure_coherence(ghz_circuit(n), {}, cfg);
        CHECK(r.parity.value.real() / -0.5 == Approx(std::pow(1 - 2 * e, n)).epsilon(1e-12));
        // exact MQC law; (1-e)^{n/2} is its first-order form
        const double exact_law = std::sqrt(std::pow(1 - e, n - 1.0) * (1 - 2 * e));
        CHECK(r.mqc->value.real() / 0.5 == Approx(exact_law).epsilon(1e-12));
        CHECK(std::abs(exact_law - std::pow(1 - e, n / 2.0)) < 0.005);
        CHECK(r.mqc->value.real() / 0.5 > r.parity.value.real() / -0.5);

        cfg.mitigate = true;
        auto m = measure_coherence(ghz_circuit(n), {}, cfg);
        CHECK(m.parity.value.real() == Approx(-0.5).epsilon(1e-12));
        CHECK(m.mqc->value.real() == Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("mitigated shot pipeline recovers the ideal coherence", "[measure][readout]") {
    const std::size_t n = 12;
    MeasureConfig cfg;
    cfg.readout = ReadoutModel::symmetric(n, 0.0085);
    cfg.mitigate = true;
    cfg.shots = 30000;
    cfg.seed = 41;
    auto r = measure_coherence(ghz_circuit(n), {}, cfg);
    CHECK(std::abs(r.parity.value.real() + 0.5) < 3 * r.parity.std);
    CHECK(r.total_shots == 30000 * 13);

    auto eng = make_engine({9, "mitigated-point"});
    const PointOptions raw{20000, ReadoutModel::symmetric(6, 0.03), false};
    const PointOptions fixed{20000, ReadoutModel::symmetric(6, 0.03), true};
    auto c = ghz_circuit(6);
    const auto a = measure_parity(c, {}, 0.0, raw, eng);
    const auto b = measure_parity(c, {}, 0.0, fixed, eng);
    CHECK(std::abs(a.value + std::pow(1 - 0.06, 6)) < 3 * a.std);
    CHECK(std::abs(b.value + 1.0) < 3 * b.std);
}

TEST_CASE("shot mode agrees with exact mode", "[measure][shots]") {
    for (std::size_t n : {4u, 8u}) {
        auto c = ghz_circuit(n, 2.0);
        MeasureConfig exact;
        exact.method = Method::mqc;
        exact.exact = true;
        auto x = measure_coherence(c, {}, exact);
        MeasureConfig shots = exact;
        shots.exact = false;
        shots.seed = 12;
        auto s = measure_coherence(c, {}, shots);
        CHECK(std::abs(s.parity.value.real() - x.parity.value.real()) < 3 * s.parity.std);
        CHECK(std::abs(s.parity.value.imag() - x.parity.value.imag()) < 3 * s.parity.std_imag);
        CHECK(std::abs(s.mqc->value.real() - x.mqc->value.real()) < 3 * s.mqc->std);
        CHECK(s.tables.size() == 2);
        CHECK(s.tables[0].shots[0] == shots_schedule(n));
    }
}

TEST_CASE("MQC has the smaller error bar at matched shots", "[measure][shots]") {
    const std::size_t n = 8, m = 3600;
    auto s = qsim::prepare(ghz_circuit(n), {});
    auto inv = ghz_circuit(n).inverse();
    auto pt = parity_signals(s, parity_settings(n), {.shots = m}, 5);
    auto mt = mqc_signals(s, inv, mqc_settings(n), {.shots = m * (n + 1) / (2 * n + 2)}, 5);
    const auto pe = extract_coherence_parity(pt, n);
    const auto me = extract_coherence_mqc(mt, n);
    CHECK(me.std < pe.std);
}

TEST_CASE("signal tables are order independent and reproducible", "[measure][determinism]") {
    auto c = ghz_circuit(5, 0.7);
    auto s = qsim::prepare(c, {});
    const PointOptions opt{500, ReadoutModel::symmetric(5, 0.02), false};
    auto a = parity_signals(s, parity_settings(5), opt, 99, 2);
    auto b = parity_signals(s, parity_settings(5), opt, 99, 2);
    CHECK(a.values == b.values);
    auto eng = make_engine({99, "parity", 3, 2});
    CHECK(parity_point(s, a.settings[3], opt, eng).value == a.values[3]);
    auto other = parity_signals(s, parity_settings(5), opt, 99, 3);
    CHECK(other.values != a.values);
}

TEST_CASE("signal CSV export", "[measure][io]") {
    auto s = qsim::prepare(ghz_circuit(3), {});
    auto t = parity_signals(s, parity_settings(3), {.shots = 100}, 1);
    const auto path = (std::filesystem::temp_directory_path() / "bellvqc_signals.csv").string();
    write_signals_csv(path, {t});
    std::ifstream is(path);
    std::string line;
    std::getline(is, line);
    CHECK(line == "method,angle,value,std,shots,repetition");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        CHECK(line.rfind("parity,", 0) == 0);
        const auto f1 = line.find(',') + 1;
        const auto f2 = line.find(',', f1) + 1;
        const double value = std::stod(line.substr(f2, line.find(',', f2) - f2));
        CHECK(value == t.values[rows]);
        ++rows;
    }
    CHECK(rows == 4);
    std::filesystem::remove(path);
}

TEST_CASE("sinusoid fit", "[measure][fit]") {
    const auto g = parity_settings(8, 81);
    std::vector<double> v, zero(g.size(), 0.0);
    for (double x : g) v.push_back(-std::cos(8 * x));
    auto f = sinusoid_fit(table_of(Method::parity, 8, g, v), 8);
    CHECK(f.amplitude == Approx(1.0).epsilon(1e-12));
    CHECK(f.phase == Approx(pi).epsilon(1e-12));
    CHECK(sinusoid_fit(table_of(Method::parity, 8, g, zero), 8).amplitude == 0.0);
    CHECK_THROWS_AS(sinusoid_fit(table_of(Method::parity, 8, {0.0, 0.1}, {1.0, 1.0}), 8), InvalidArgument);
    CHECK_THROWS_AS(sinusoid_fit(table_of(Method::parity, 2, {0.0, pi, 2 * pi}, {1.0, 1.0, 1.0}), 2),
                    NumericalError);
}

TEST_CASE("sparse, dense and fit agree", "[measure][fit][property]") {
    auto eng = make_engine({10, "three-way"});
    const std::size_t n = 8;
    for (int trial = 0; trial < 6; ++trial) {
        auto c = trial == 0 ? ghz_circuit(n, 2.3) : oracle::random_circuit(n, 20, eng);
        const auto p = oracle::random_params(c.num_params(), eng);
        const auto s = qsim::prepare(c, p);
        auto sparse = extract_coherence_parity(parity_signals(s, parity_settings(n), {}, 0), n);
        auto dense_t = parity_signals(s, parity_settings(n, 10 * n + 1), {}, 0);
        auto dense = extract_coherence_parity(dense_t, n);
        auto fit = coherence_from_fit(sinusoid_fit(dense_t, static_cast<int>(n)), n);
        CHECK(std::abs(sparse.value - dense.value) < 1e-9);
        CHECK(std::abs(fit.value - dense.value) < 1e-9);
    }
}

TEST_CASE("repetition error bars", "[measure][repetitions]") {
    CoherenceEstimate a, b, c;
    a.value = 0.1;
    b.value = 0.2;
    c.value = 0.3;
    for (auto *e : {&a, &b, &c}) {
        e->energy = e->value.real() * 2;
        e->std = 0.05;
    }
    auto r = combine_runs({a, b, c}, ErrorBars::repetitions);
    CHECK(r.value.real() == Approx(0.2));
    CHECK(r.std == Approx(0.1));
    CHECK(r.energy_std == Approx(0.2));
    auto bin = combine_runs({a, b, c}, ErrorBars::binomial);
    CHECK(bin.std == Approx(0.05 / std::sqrt(3.0)));

    MeasureConfig cfg;
    cfg.shots = 400;
    cfg.repetitions = 5;
    cfg.error_bars = ErrorBars::repetitions;
    auto rep = measure_coherence(ghz_circuit(4), {}, cfg);
    CHECK(rep.parity_runs.size() == 5);
    CHECK(rep.tables.size() == 5);
    CHECK(rep.tables[3].repetition == 3);
    cfg.repetitions = 1;
    CHECK_THROWS_AS(measure_coherence(ghz_circuit(4), {}, cfg), ConfigError);
}

TEST_CASE("Pauli shot evaluator", "[measure][shots]") {
    auto eng = make_engine({11, "pauli-shots"});
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 2 + eng() % 4;
        auto c = oracle::random_circuit(n, 12, eng);
        auto h = oracle::random_pauli_sum(n, 6, eng);
        h.add(0.7, std::string(n, 'I'));
        const auto p = oracle::random_params(c.num_params(), eng);
        const double want = oracle::expect_dense(oracle::run_dense(c, p), h);
        auto ev = pauli_shot_evaluator(h, {.shots = 4000, .seed = 3});
        const auto got = ev(c, p);
        CHECK(std::abs(got.value - want) < 4 * got.std + 1e-12);
        CHECK(got.shots % 4000 == 0);
        auto again = pauli_shot_evaluator(h, {.shots = 4000, .seed = 3});
        CHECK(again(c, p).value == got.value);
        CHECK(ev(c, p).value != got.value); // next call, next stream
    }
    CHECK(group_qubitwise(bell::build_honeycomb_hamiltonian(bell::brick_wall(2, 3), 0.5)).size() == 2);

    // mitigated readout
    qsim::PauliSum zz(2);
    zz.add(1.0, "ZZ");
    qsim::Circuit id(2);
    auto raw = pauli_shot_evaluator(zz, {20000, 1, ReadoutModel::symmetric(2, 0.1), false})(id, {});
    auto fixed = pauli_shot_evaluator(zz, {20000, 1, ReadoutModel::symmetric(2, 0.1), true})(id, {});
    CHECK(std::abs(raw.value - 0.64) < 3 * raw.std);
    CHECK(std::abs(fixed.value - 1.0) < 3 * fixed.std + 1e-12);
}

TEST_CASE("GHZ shot evaluator and shot-mode training", "[measure][shots]") {
    auto ev = ghz_shot_evaluator(6, {.shots = 2400, .seed = 8});
    auto e = ev(ghz_circuit(6), {});
    CHECK(std::abs(e.value + std::pow(2.0, 2.5)) < 3 * e.std + 1e-12);
    CHECK(e.shots == 2400 * 7);

    qsim::PauliSum h(2);
    h.add(std::sqrt(2.0), "XX").add(std::sqrt(2.0), "ZZ");
    auto c = vqc::build_chain_ansatz(2, 2);
    vqc::TrainConfig cfg;
    cfg.max_iters = 60;
    cfg.revert_tolerance.reset();
    auto r = vqc::train(c, make_evaluator(h, false, {.shots = 2000, .seed = 4}),
                        vqc::initial_params(c.num_params(), vqc::InitMode::uniform, 2), cfg);
    CHECK(r.final_energy.value < -2.0);
    CHECK(r.records.back().shots_used > 0);
    auto r2 = vqc::train(c, make_evaluator(h, false, {.shots = 2000, .seed = 4}),
                         vqc::initial_params(c.num_params(), vqc::InitMode::uniform, 2), cfg);
    CHECK(r2.records.back().energy == r.records.back().energy);
}
