#pragma once

#include <bit>
#include <cmath>
#include <numbers>

#include "bellvqc/bell/expression.hpp"
#include "bellvqc/bell/lattice.hpp"

namespace bellvqc::bell {

struct BellModel {
    BellExpression expression;
    MeasurementAssignment settings;
};

namespace detail {

inline void check_eps(double eps) {
    if (!(eps >= -1.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in [-1, 1]");
}

inline void check_party_count(std::size_t n, const char *what) {
    if (n < 2 || n > 24) {
        throw InvalidArgument(std::string(what) + " needs 2 <= n <= 24, got " + std::to_string(n));
    }
}

inline constexpr double inv_sqrt3 = 0.57735026918962576451;

/// Gisin tetrahedron (A) and orthogonal triad (B).
inline const std::vector<Bloch> &tetrahedron() {
    static const std::vector<Bloch> v{{inv_sqrt3, inv_sqrt3, inv_sqrt3},
                                      {inv_sqrt3, -inv_sqrt3, -inv_sqrt3},
                                      {-inv_sqrt3, inv_sqrt3, -inv_sqrt3},
                                      {-inv_sqrt3, -inv_sqrt3, inv_sqrt3}};
    return v;
}

inline const std::vector<Bloch> &triad() {
    static const std::vector<Bloch> v{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    return v;
}

/// Modified-Gisin coefficient table c[x_A][y_B].
inline double gisin_coefficient(int x, int y, double delta) {
    static constexpr int sign[3][4] = {{1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
    return sign[y][x] * (y == 2 ? delta : 1.0);
}

/// Minimum of the two-party modified-Gisin expression over local strategies.
inline double gisin_pair_bound(double delta) {
    return -(2.0 * std::abs(delta) + std::abs(delta + 2.0) + std::abs(delta - 2.0));
}

} // namespace detail

// ---------------------------------------------------------------- honeycomb

/// Link coupling J_tau(eps): 1 + eps on r bonds, (1 - eps)/2 on b and g.
[[nodiscard]] inline double honeycomb_coupling(char color, double eps) {
    (void)HoneycombLattice::color_index(color);
    return color == 'r' ? 1.0 + eps : (1.0 - eps) / 2.0;
}

/// CHSH settings: A0 = Z, A1 = X on sublattice A; B0,1 = (Z +- X)/sqrt2 on B.
[[nodiscard]] inline MeasurementAssignment honeycomb_settings(const HoneycombLattice &lat) {
    const double r = std::numbers::sqrt2 / 2.0;
    std::vector<std::vector<Bloch>> obs;
    for (auto s : lat.sublattice()) {
        if (s == Sublattice::A) obs.push_back({{0, 0, 1}, {1, 0, 0}});
        else obs.push_back({{r, 0, r}, {-r, 0, r}});
    }
    return MeasurementAssignment(std::move(obs));
}

[[nodiscard]] inline BellExpression build_honeycomb_expression(const HoneycombLattice &lat,
                                                               double eps) {
    detail::check_eps(eps);
    if (lat.links().empty()) throw InvalidArgument("lattice has no links");
    BellExpression e("honeycomb", std::vector<std::size_t>(lat.num_sites(), 2));
    e.reserve(4 * lat.links().size());
    double sum_j = 0.0;
    for (const auto &l : lat.links()) {
        const double j = honeycomb_coupling(l.color, eps);
        sum_j += j;
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) e.add({{l.a, x}, {l.b, y}}, (x * y == 1 ? -j : j));
        }
    }
    e.set_classical_bound(-2.0 * sum_j);
    return e;
}

/// sum_tau sqrt2 J_tau (X_A X_B + Z_A Z_B).
[[nodiscard]] inline qsim::PauliSum build_honeycomb_hamiltonian(const HoneycombLattice &lat,
                                                                double eps) {
    detail::check_eps(eps);
    if (lat.links().empty()) throw InvalidArgument("lattice has no links");
    qsim::PauliSum h(lat.num_sites());
    for (const auto &l : lat.links()) {
        const double w = std::numbers::sqrt2 * honeycomb_coupling(l.color, eps);
        h.add(w, {{l.a, 'X'}, {l.b, 'X'}});
        h.add(w, {{l.a, 'Z'}, {l.b, 'Z'}});
    }
    return h;
}

// ---------------------------------------------------------------- 1D chain

/// J_i(eps) = (4/sqrt3)(1 - (-1)^i eps) for the 1-indexed link i.
[[nodiscard]] inline double chain_coupling(std::size_t i, double eps) {
    const double s = (i % 2 == 0) ? 1.0 : -1.0;
    return 4.0 * detail::inv_sqrt3 * (1.0 - s * eps);
}

inline void check_chain(std::size_t n, double eps) {
    detail::check_eps(eps);
    if (n < 3 || n % 2 == 0) {
        throw InvalidArgument("chain length must be odd and >= 3, got " + std::to_string(n));
    }
}

/// -(n-1)(2|D| + |D+2| + |D-2|); only defined for odd n.
[[nodiscard]] inline double classical_bound_chain(std::size_t n, double delta) {
    if (n < 3 || n % 2 == 0) {
        throw InvalidArgument("chain length must be odd and >= 3, got " + std::to_string(n));
    }
    return static_cast<double>(n - 1) * detail::gisin_pair_bound(delta);
}

/// Odd sites (1-indexed) carry the tetrahedral A settings, even sites the
/// X, Y, Z triad. Qubit q is site q + 1.
[[nodiscard]] inline MeasurementAssignment chain_settings(std::size_t n) {
    std::vector<std::vector<Bloch>> obs;
    for (std::size_t q = 0; q < n; ++q) {
        obs.push_back(q % 2 == 0 ? detail::tetrahedron() : detail::triad());
    }
    return MeasurementAssignment(std::move(obs));
}

[[nodiscard]] inline BellExpression build_chain_expression(std::size_t n, double delta,
                                                           double eps) {
    check_chain(n, eps);
    std::vector<std::size_t> m(n);
    for (std::size_t q = 0; q < n; ++q) m[q] = q % 2 == 0 ? 4 : 3;
    BellExpression e("chain", m);
    e.reserve(12 * (n - 1));
    double sum_w = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double w = 1.0 - ((i % 2 == 0) ? 1.0 : -1.0) * eps;
        sum_w += w;
        // Site i is odd exactly when the left end of the link is party A.
        const std::size_t qa = (i % 2 == 1) ? i - 1 : i;
        const std::size_t qb = (i % 2 == 1) ? i : i - 1;
        for (int x = 0; x < 4; ++x) {
            for (int y = 0; y < 3; ++y) {
                const double c = w * detail::gisin_coefficient(x, y, delta);
                if (c != 0.0) e.add({{qa, x}, {qb, y}}, c);
            }
        }
    }
    e.set_classical_bound(sum_w * detail::gisin_pair_bound(delta));
    return e;
}

[[nodiscard]] inline qsim::PauliSum build_chain_hamiltonian(std::size_t n, double delta,
                                                            double eps) {
    check_chain(n, eps);
    qsim::PauliSum h(n);
    for (std::size_t i = 1; i < n; ++i) {
        const double j = chain_coupling(i, eps);
        h.add(j, {{i - 1, 'X'}, {i, 'X'}});
        h.add(j, {{i - 1, 'Y'}, {i, 'Y'}});
        if (delta != 0.0) h.add(j * delta, {{i - 1, 'Z'}, {i, 'Z'}});
    }
    return h;
}

// ---------------------------------------------------------------- two-party

[[nodiscard]] inline BellModel build_chsh() {
    BellExpression e("chsh", {2, 2});
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) e.add({{0, x}, {1, y}}, x * y == 1 ? -1.0 : 1.0);
    }
    e.set_classical_bound(-2.0);
    return {std::move(e), honeycomb_settings(single_link())};
}

/// Gisin's elegant inequality (A: 4 settings, B: 3 settings), beta_C = -6.
[[nodiscard]] inline BellModel build_gisin() {
    BellExpression e("gisin", {4, 3});
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 3; ++y) e.add({{0, x}, {1, y}}, detail::gisin_coefficient(x, y, 1.0));
    }
    e.set_classical_bound(detail::gisin_pair_bound(1.0));
    return {std::move(e), MeasurementAssignment({detail::tetrahedron(), detail::triad()})};
}

// ---------------------------------------------------------------- GHZ family

/// Local minimum of the normalized Svetlichny expression: -1 for even n,
/// -sqrt2 for odd n. The sum equals Re P + Im P with P = prod_i (a_i0 + i a_i1).
[[nodiscard]] inline double svetlichny_classical_bound(std::size_t n) {
    return n % 2 == 0 ? -1.0 : -std::numbers::sqrt2;
}

/// Local minimum of the normalized Mermin expression, -2^{floor(n/2) - (n-1)/2}.
[[nodiscard]] inline double mermin_classical_bound(std::size_t n) {
    return -std::pow(2.0, static_cast<double>(n / 2) - (static_cast<double>(n) - 1.0) / 2.0);
}

/// Coefficients 2^{-n/2} (-1)^{floor(|x|/2)}; observables
/// cos(phi_x) X + sin(phi_x) Y with phi_0 = -pi/4n, phi_1 = (2n-1) pi/4n.
[[nodiscard]] inline BellModel build_svetlichny(std::size_t n) {
    detail::check_party_count(n, "Svetlichny");
    BellExpression e("svetlichny", std::vector<std::size_t>(n, 2));
    const std::size_t count = std::size_t{1} << n;
    e.reserve(count);
    const double w = std::pow(2.0, -static_cast<double>(n) / 2.0);
    std::vector<std::int8_t> x(n);
    for (std::size_t t = 0; t < count; ++t) {
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::int8_t>((t >> i) & 1U);
        const auto ones = static_cast<std::size_t>(std::popcount(t));
        e.add(x, (ones / 2) % 2 == 0 ? w : -w);
    }
    e.set_classical_bound(svetlichny_classical_bound(n));
    const double nn = static_cast<double>(n);
    const double p0 = -std::numbers::pi / (4.0 * nn);
    const double p1 = (2.0 * nn - 1.0) * std::numbers::pi / (4.0 * nn);
    const std::vector<Bloch> party{{std::cos(p0), std::sin(p0), 0.0},
                                   {std::cos(p1), std::sin(p1), 0.0}};
    return {std::move(e), MeasurementAssignment(std::vector<std::vector<Bloch>>(n, party))};
}

/// Coefficients 2^{-(n-1)/2} (-1)^{|x|/2} over even-|x| tuples; settings X, Y.
[[nodiscard]] inline BellModel build_mermin(std::size_t n) {
    detail::check_party_count(n, "Mermin");
    BellExpression e("mermin", std::vector<std::size_t>(n, 2));
    const std::size_t count = std::size_t{1} << n;
    e.reserve(count / 2);
    const double w = std::pow(2.0, -(static_cast<double>(n) - 1.0) / 2.0);
    std::vector<std::int8_t> x(n);
    for (std::size_t t = 0; t < count; ++t) {
        const auto ones = static_cast<std::size_t>(std::popcount(t));
        if (ones % 2 != 0) continue;
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::int8_t>((t >> i) & 1U);
        e.add(x, (ones / 2) % 2 == 0 ? w : -w);
    }
    e.set_classical_bound(mermin_classical_bound(n));
    const std::vector<Bloch> party{{1, 0, 0}, {0, 1, 0}};
    return {std::move(e), MeasurementAssignment(std::vector<std::vector<Bloch>>(n, party))};
}

/// 2^{(n-1)/2} (|0...0><1...1| + h.c.) as a dense matrix.
[[nodiscard]] inline qsim::DenseMatrix ghz_bell_operator_dense(std::size_t n) {
    if (n > qsim::max_dense_qubits) throw CapacityError("dense GHZ operator limited to 12 qubits");
    const Eigen::Index dim = Eigen::Index{1} << n;
    qsim::DenseMatrix m = qsim::DenseMatrix::Zero(dim, dim);
    const double c = std::pow(2.0, (static_cast<double>(n) - 1.0) / 2.0);
    m(0, dim - 1) = c;
    m(dim - 1, 0) = c;
    return m;
}

} // namespace bellvqc::bell
