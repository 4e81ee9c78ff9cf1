#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

#include "bellvqc/qsim/pauli_sum.hpp"
#include "bellvqc/rng.hpp"

namespace bellvqc::qsim {

struct LanczosOptions {
    double tol = 1e-8;                 // relative accuracy target for the eigenvalue
    std::size_t max_matvecs = 10000;   // hard cap across all restarts
    std::size_t krylov_dim = 250;      // steps per restart cycle
    std::uint64_t seed = 0x1A2C05ULL;  // start-vector stream
};

struct LanczosResult {
    double eigenvalue = 0.0;
    double residual = 0.0; // ||H y - theta y|| for the normalized Ritz vector y
    std::size_t matvecs = 0;
    std::size_t restarts = 0;
};

namespace detail {

inline double dot_re(std::span<const cplx> a, std::span<const cplx> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a[i]) * b[i]).real();
    return s;
}

inline double nrm(std::span<const cplx> a) {
    double s = 0.0;
    for (const auto &x : a) s += std::norm(x);
    return std::sqrt(s);
}

} // namespace detail

/// Lowest eigenvalue of a Hermitian operator given only as a mat-vec.
///
/// Plain three-term Lanczos without reorthogonalization (memory stays at a few
/// vectors, enough for 2^24 amplitudes). Lost orthogonality only duplicates
/// converged Ritz values, so the minimum is unaffected. Each cycle ends with a
/// second pass that rebuilds the Ritz vector and checks its residual; a cycle
/// that stagnates restarts from that Ritz vector.
template <class MatVec>
[[nodiscard]] LanczosResult lanczos_ground(MatVec &&apply, std::size_t dim,
                                           const LanczosOptions &opt = {}) {
    if (dim == 0) throw InvalidArgument("empty operator");
    LanczosResult res;

    std::vector<cplx> start(dim);
    {
        auto eng = make_engine({opt.seed, "lanczos-start"});
        for (auto &x : start) x = cplx{uniform01(eng) - 0.5, uniform01(eng) - 0.5};
        const double n0 = detail::nrm(start);
        for (auto &x : start) x /= n0;
    }

    std::vector<cplx> v(dim), v_prev(dim), w(dim), y(dim);

    // Runs the recurrence from `start` for up to `steps` steps. When `coeffs`
    // is non-null, accumulates y = sum_j coeffs[j] v_j instead of recording.
    auto run = [&](std::size_t steps, std::vector<double> *alphas, std::vector<double> *betas,
                   const Eigen::VectorXd *coeffs, double *theta_out) -> std::size_t {
        std::copy(start.begin(), start.end(), v.begin());
        std::fill(v_prev.begin(), v_prev.end(), cplx{0.0, 0.0});
        if (coeffs) std::fill(y.begin(), y.end(), cplx{0.0, 0.0});
        double beta_prev = 0.0;
        std::vector<double> history;
        std::size_t j = 0;
        for (; j < steps; ++j) {
            if (coeffs) {
                const double c = (*coeffs)(static_cast<Eigen::Index>(j));
                for (std::size_t i = 0; i < dim; ++i) y[i] += c * v[i];
                if (j + 1 == steps) { ++j; break; }
            }
            apply(std::span<const cplx>(v), std::span<cplx>(w));
            ++res.matvecs;
            const double alpha = detail::dot_re(v, w);
            for (std::size_t i = 0; i < dim; ++i) w[i] -= alpha * v[i] + beta_prev * v_prev[i];
            const double beta = detail::nrm(w);
            if (alphas) {
                alphas->push_back(alpha);
                const auto k = static_cast<Eigen::Index>(alphas->size());
                Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alphas->data(), k);
                Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(betas->data(), k - 1);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
                es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
                const double theta = es.eigenvalues()(0);
                history.push_back(theta);
                *theta_out = theta;
                const double scale = std::max(1.0, std::abs(theta));
                if (beta <= 1e-12 * scale) { ++j; break; } // invariant subspace
                if (history.size() > 6 &&
                    std::abs(history[history.size() - 6] - theta) <= 1e-3 * opt.tol * scale) {
                    ++j;
                    break;
                }
                if (res.matvecs >= opt.max_matvecs) { ++j; break; }
                betas->push_back(beta);
            } else if (beta == 0.0) {
                ++j;
                break;
            }
            for (std::size_t i = 0; i < dim; ++i) {
                v_prev[i] = v[i];
                v[i] = w[i] / beta;
            }
            beta_prev = beta;
        }
        return j;
    };

    for (;;) {
        std::vector<double> alphas, betas;
        double theta = 0.0;
        const std::size_t steps = std::min(opt.krylov_dim, dim);
        const std::size_t k = run(steps, &alphas, &betas, nullptr, &theta);

        Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alphas.data(),
                                                              static_cast<Eigen::Index>(k));
        Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(betas.data(),
                                                              static_cast<Eigen::Index>(k - 1));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        theta = es.eigenvalues()(0);
        const Eigen::VectorXd s = es.eigenvectors().col(0);

        run(k, nullptr, nullptr, &s, nullptr);
        const double ny = detail::nrm(y);
        for (auto &x : y) x /= ny;
        apply(std::span<const cplx>(y), std::span<cplx>(w));
        ++res.matvecs;
        for (std::size_t i = 0; i < dim; ++i) w[i] -= theta * y[i];
        const double r = detail::nrm(w);
        const double scale = std::max(1.0, std::abs(theta));

        res.eigenvalue = theta;
        res.residual = r;
        if (r <= std::sqrt(opt.tol) * 1e-2 * scale || k == dim) return res;
        if (res.matvecs >= opt.max_matvecs) {
            throw ConvergenceError("Lanczos did not converge within " +
                                   std::to_string(opt.max_matvecs) +
                                   " mat-vecs (residual " + std::to_string(r) + ")");
        }
        std::copy(y.begin(), y.end(), start.begin());
        ++res.restarts;
    }
}

/// Ground-state energy of a Pauli sum via streaming Lanczos (up to 24+ qubits).
[[nodiscard]] inline LanczosResult ground_state_lanczos(const PauliSum &h,
                                                        const LanczosOptions &opt = {}) {
    if (h.num_qubits() > max_qubits) throw CapacityError("operator too large for Lanczos");
    const CompiledPauliSum compiled(h);
    const std::size_t dim = std::size_t{1} << h.num_qubits();
    return lanczos_ground(
        [&](std::span<const cplx> in, std::span<cplx> out) { compiled.apply(in, out); }, dim,
        opt);
}

[[nodiscard]] inline double ground_energy(const PauliSum &h, const LanczosOptions &opt = {}) {
    return ground_state_lanczos(h, opt).eigenvalue;
}

} // namespace bellvqc::qsim
