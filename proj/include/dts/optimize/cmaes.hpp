#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dts/optimize/common.hpp"

namespace dts::opt {

/// (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu updates and
/// cumulative step-size adaptation. Search runs in coordinates scaled to
/// the unit box; samples outside it are clamped and the clamped point is
/// used in the update.
inline OptimizationRun run_cmaes(const SearchSpace& space, const Objective& f, const OptimizerConfig& cfg)
{
    check_config(cfg);
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    std::mt19937_64 rng(cfg.rng_seed);
    Evaluator ev(space, f, cfg.n_eval, cfg.jobs);
    const int n = int(space.size());
    const double nd = double(n);
    const int lambda = std::max(2, cfg.n_pop);
    const int mu = lambda / 2;

    VectorXd weights(mu);
    for (int i = 0; i < mu; ++i)
        weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();

    const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
    const double cs = (mueff + 2.0) / (nd + mueff + 5.0);
    const double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nd + 2.0) * (nd + 2.0) + mueff));
    const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

    VectorXd mean = VectorXd::Constant(n, 0.5);
    double sigma = cfg.cmaes_sigma0;
    VectorXd pc = VectorXd::Zero(n), ps = VectorXd::Zero(n);
    MatrixXd C = MatrixXd::Identity(n, n);
    MatrixXd B = MatrixXd::Identity(n, n);
    VectorXd D = VectorXd::Ones(n);

    auto to_real = [&](const VectorXd& u) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            x[std::size_t(j)] = space.dims[std::size_t(j)].lo + u[j] * space.dims[std::size_t(j)].width();
        return x;
    };

    const int gens = generation_count(cfg) + 1; // the first sample is the initial population
    for (int gen = 0; gen < gens && !ev.exhausted(); ++gen) {
        std::vector<VectorXd> u(static_cast<std::size_t>(lambda));
        std::vector<std::vector<double>> xs;
        for (int k = 0; k < lambda; ++k) {
            VectorXd z(n);
            for (int j = 0; j < n; ++j)
                z[j] = gauss(rng);
            VectorXd s = mean + sigma * (B * D.asDiagonal() * z);
            s = s.cwiseMax(0.0).cwiseMin(1.0);
            u[std::size_t(k)] = s;
            xs.push_back(to_real(s));
        }
        const auto fx = ev.evaluate(xs);

        std::vector<int> order(static_cast<std::size_t>(lambda));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fx[std::size_t(a)] < fx[std::size_t(b)]; });

        const VectorXd old_mean = mean;
        mean.setZero();
        for (int i = 0; i < mu; ++i)
            mean += weights[i] * u[std::size_t(order[std::size_t(i)])];
        const VectorXd yw = (mean - old_mean) / sigma;

        const MatrixXd inv_sqrt_c = B * D.cwiseInverse().asDiagonal() * B.transpose();
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt_c * yw);
        const double ps_norm = ps.norm();
        const bool hsig =
            ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (gen + 1))) / chi_n < 1.4 + 2.0 / (nd + 1.0);
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;

        MatrixXd rank_mu = MatrixXd::Zero(n, n);
        for (int i = 0; i < mu; ++i) {
            const VectorXd y = (u[std::size_t(order[std::size_t(i)])] - old_mean) / sigma;
            rank_mu += weights[i] * y * y.transpose();
        }
        C = (1.0 - c1 - cmu) * C + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * C) + cmu * rank_mu;
        sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));
        sigma = std::min(sigma, 1.0);

        C = 0.5 * (C + C.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C);
        B = eig.eigenvectors();
        D = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
        if (sigma * D.maxCoeff() < 1e-14)
            sigma = 1e-14 / D.maxCoeff(); // keep sampling well defined once converged
    }
    return ev.finish(Algorithm::cmaes);
}

} // namespace dts::opt
