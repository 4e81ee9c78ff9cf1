#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bellvqc/bell/expression.hpp"

namespace bellvqc::bell {

/// Lower bound on <B_N> for k-producible correlations, -2^{(n - ceil(n/k))/2}.
[[nodiscard]] inline double k_nonlocal_bound(std::size_t n, std::size_t k) {
    if (k < 1 || k >= n) {
        throw InvalidArgument("k must satisfy 1 <= k <= n-1 (n=" + std::to_string(n) +
                              ", k=" + std::to_string(k) + ")");
    }
    const std::size_t groups = (n + k - 1) / k;
    return -std::pow(2.0, (static_cast<double>(n) - static_cast<double>(groups)) / 2.0);
}

/// Largest scenario the deterministic-strategy search accepts (sum of settings).
inline constexpr std::size_t max_lhv_settings = 24;

/// Exact minimum of the expression over deterministic local strategies.
///
/// Parties 0..N-2 are enumerated depth first; each assignment contracts that
/// party out of a dense coefficient tensor. The last party is minimized in
/// closed form: T[absent] - sum_x |T[x]|.
[[nodiscard]] inline double lhv_bound_bruteforce(const BellExpression &expr) {
    const auto n = expr.num_parties();
    const auto &m = expr.settings_per_party();
    std::size_t total = 0;
    double cells = 1.0;
    for (auto mi : m) {
        total += mi;
        cells *= static_cast<double>(mi + 1);
    }
    if (total > max_lhv_settings) {
        throw CapacityError("LHV enumeration needs sum of settings <= " +
                            std::to_string(max_lhv_settings) + ", got " + std::to_string(total));
    }
    if (cells > double(1 << 26)) throw CapacityError("LHV coefficient tensor too large");

    // Party 0 varies fastest; index m_i stands for "party absent".
    std::vector<std::vector<double>> level(n);
    {
        auto &t = level[0];
        t.assign(static_cast<std::size_t>(cells), 0.0);
        for (std::size_t k = 0; k < expr.num_terms(); ++k) {
            const auto x = expr.setting(k);
            std::size_t idx = 0, stride = 1;
            for (std::size_t i = 0; i < n; ++i) {
                idx += stride * static_cast<std::size_t>(x[i] == absent ? m[i] : x[i]);
                stride *= m[i] + 1;
            }
            t[idx] += expr.weight(k);
        }
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> outcome;
    auto rec = [&](auto &self, std::size_t d) -> void {
        const auto &t = level[d];
        const std::size_t width = m[d] + 1;
        if (d + 1 == n) {
            double v = t[m[d]];
            for (std::size_t x = 0; x < m[d]; ++x) v -= std::abs(t[x]);
            best = std::min(best, v);
            return;
        }
        auto &next = level[d + 1];
        next.assign(t.size() / width, 0.0);
        outcome.assign(width, 1.0);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m[d]); ++mask) {
            for (std::size_t x = 0; x < m[d]; ++x) outcome[x] = ((mask >> x) & 1U) ? -1.0 : 1.0;
            for (std::size_t r = 0; r < next.size(); ++r) {
                const double *row = t.data() + r * width;
                double s = row[m[d]];
                for (std::size_t x = 0; x < m[d]; ++x) s += outcome[x] * row[x];
                next[r] = s;
            }
            self(self, d + 1);
        }
    };
    rec(rec, 0);
    return best;
}

struct DepthMargin {
    std::size_t k = 0;
    double bound = 0.0;
    double sigma_margin = 0.0; // (bound - energy) / std; +-inf when std = 0
};

struct DepthCertificate {
    std::size_t num_parties = 0;
    double energy = 0.0;
    double energy_std = 0.0;
    std::vector<DepthMargin> margins; // k = 1 .. N-1
    std::size_t certified_depth = 1;
};

/// Depth = 1 + max{k : energy < bound_k}; equality certifies nothing.
[[nodiscard]] inline DepthCertificate certify_depth(std::size_t n, double energy,
                                                    double energy_std) {
    if (n < 2) throw InvalidArgument("depth certification needs at least two parties");
    if (!(energy_std >= 0.0)) throw InvalidArgument("energy_std must be >= 0");
    if (!std::isfinite(energy)) throw NumericalError("non-finite energy");
    DepthCertificate c;
    c.num_parties = n;
    c.energy = energy;
    c.energy_std = energy_std;
    for (std::size_t k = 1; k < n; ++k) {
        DepthMargin d;
        d.k = k;
        d.bound = k_nonlocal_bound(n, k);
        const double gap = d.bound - energy;
        if (energy_std > 0.0) {
            d.sigma_margin = gap / energy_std;
        } else {
            d.sigma_margin = gap > 0.0   ? std::numeric_limits<double>::infinity()
                             : gap < 0.0 ? -std::numeric_limits<double>::infinity()
                                         : 0.0;
        }
        if (energy < d.bound) c.certified_depth = std::max(c.certified_depth, k + 1);
        c.margins.push_back(d);
    }
    return c;
}

} // namespace bellvqc::bell
