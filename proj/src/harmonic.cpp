#include "hodge/harmonic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hodge/prng.hpp"

namespace hodge {

double initial_value(std::uint64_t seed, Index e) {
    return to_unit_interval(splitmix_at(seed, static_cast<std::uint64_t>(e))) - 0.5;
}

Eigen::VectorXd initial_vector(Index length, std::uint64_t seed) {
    Eigen::VectorXd y(length);
    for (Index e = 0; e < length; ++e) y[e] = initial_value(seed, e);
    return y;
}

double compute_delta(const Laplacian1& laplacian) {
    const double norm = l1_one_norm(laplacian);
    if (!(norm > 0.0)) throw ZeroMatrix("Laplacian has no nonzero entries");
    return 1.0 / norm;
}

std::int64_t default_max_iterations(Index edges, double epsilon) {
    const auto digits = static_cast<std::int64_t>(std::max(1.0, std::ceil(-std::log10(epsilon))));
    return std::max<std::int64_t>(1000, 100 * static_cast<std::int64_t>(edges) * digits);
}

bool ConvergenceMonitor::observe(std::int64_t iteration, double update_norm) {
    if (update_norm == 0.0) return true;
    if (last_ && last_->second > 0.0 && iteration > last_->first) {
        const double gap = static_cast<double>(iteration - last_->first);
        ratios_.push_back(std::pow(update_norm / last_->second, 1.0 / gap));
        if (ratios_.size() > kRatioWindow) ratios_.pop_front();
    }
    last_ = {iteration, update_norm};

    if (!(update_norm < epsilon_ * delta_)) return false;
    const auto q = contraction();
    if (!q || !(*q < 1.0)) return false;
    return update_norm * *q / (1.0 - *q) < epsilon_;
}

std::optional<double> ConvergenceMonitor::contraction() const {
    if (ratios_.size() < kRatioWindow) return std::nullopt;
    return *std::max_element(ratios_.begin(), ratios_.end());
}

HarmonicResult iterate_harmonic(const Laplacian1& laplacian, const HarmonicConfig& config,
                                const IterateObserver& observer) {
    const Index n = laplacian.size();
    HarmonicResult result;
    result.y = initial_vector(n, config.seed);
    if (n == 0) return result;

    result.delta_used = config.delta.value_or(compute_delta(laplacian));
    const std::int64_t cap = config.max_iterations.value_or(default_max_iterations(n, config.epsilon));
    ConvergenceMonitor monitor(config.epsilon, result.delta_used);

    Eigen::VectorXd next(n);
    while (true) {
        double update = 0.0;
        for (Index i = 0; i < n; ++i) {
            next[i] = relaxed_value(laplacian.row(i), result.y[i], result.delta_used,
                                    [&](Index j) { return result.y[j]; });
            update = max_keep_nan(update, std::abs(next[i] - result.y[i]));
        }
        result.y.swap(next);
        ++result.iterations;
        result.final_update_norm = update;
        if (observer) observer(result.iterations, result.y);

        if (!std::isfinite(update))
            throw MaxIterationsExceeded("harmonic iteration diverged", std::move(result));
        if (monitor.observe(result.iterations, update)) return result;
        if (result.iterations >= cap)
            throw MaxIterationsExceeded("harmonic iteration hit the cap of " + std::to_string(cap) + " iterations",
                                        std::move(result));
    }
}

Eigen::VectorXd project_onto_kernel_reference(const Laplacian1& laplacian, const Eigen::VectorXd& y0,
                                              Index max_edges) {
    const Index n = laplacian.size();
    if (n > max_edges)
        throw ScaleExceeded("reference projection limited to " + std::to_string(max_edges) + " edges");
    if (n == 0) return Eigen::VectorXd(0);

    const Eigen::MatrixXd dense = Eigen::MatrixXd(laplacian.matrix);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(dense);
    lu.setThreshold(1e-9);
    if (lu.dimensionOfKernel() == 0) return Eigen::VectorXd::Zero(n);

    const Eigen::MatrixXd kernel = lu.kernel();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
    const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, kernel.cols());
    return basis * (basis.transpose() * y0);
}

}  // namespace hodge
