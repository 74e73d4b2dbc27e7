#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>

#include <Eigen/Core>

#include "hodge/complex.hpp"
#include "hodge/errors.hpp"

namespace hodge {

struct HarmonicConfig {
    double epsilon = 1e-6;
    std::optional<double> delta;                  // default 1 / ||L1||_1
    std::optional<std::int64_t> max_iterations;   // default 100 * |E| * digits(epsilon)
    std::uint64_t seed = 0;
};

struct HarmonicResult {
    Eigen::VectorXd y;
    std::int64_t iterations = 0;
    double delta_used = 0.0;
    double final_update_norm = 0.0;  // ||y^k - y^{k-1}||_inf at exit
};

class MaxIterationsExceeded : public Error {
public:
    MaxIterationsExceeded(const std::string& what, HarmonicResult partial)
        : Error(what), partial_(std::move(partial)) {}
    const HarmonicResult& partial() const noexcept { return partial_; }

private:
    HarmonicResult partial_;
};

/// Entries uniform on [-0.5, 0.5); entry e is element e of the SplitMix64
/// stream for `seed`, so it can be drawn independently of the others.
double initial_value(std::uint64_t seed, Index e);
Eigen::VectorXd initial_vector(Index length, std::uint64_t seed);

/// 1 / ||L1||_1. Throws ZeroMatrix for an empty Laplacian.
double compute_delta(const Laplacian1& laplacian);

std::int64_t default_max_iterations(Index edges, double epsilon);

/// Stopping rule shared by the centralized and simulated iterations.
///
/// Stops once ||dy||_inf < epsilon * delta (which bounds ||L1 y||_inf by
/// epsilon) and the geometric tail ||dy||_inf * q / (1 - q) is below epsilon,
/// q being the largest per-step contraction ratio among the last few
/// observations. The second test ties the stop to the distance from the
/// limit rather than to the residual; the two differ by a factor 1/lambda_1.
/// Observations may be spaced more than one iteration apart.
class ConvergenceMonitor {
public:
    static constexpr int kRatioWindow = 5;

    ConvergenceMonitor(double epsilon, double delta) : epsilon_(epsilon), delta_(delta) {}

    /// Feeds ||y^k - y^{k-1}||_inf; returns true when the iteration may stop at k.
    bool observe(std::int64_t iteration, double update_norm);

    /// Largest recent per-step contraction ratio, or nullopt before the window fills.
    std::optional<double> contraction() const;

private:
    double epsilon_;
    double delta_;
    std::optional<std::pair<std::int64_t, double>> last_;
    std::deque<double> ratios_;
};

/// delta * (L1 y)_i accumulated left to right over the stored row. The
/// simulator evaluates rows through the same function so both paths round
/// identically.
template <typename Lookup>
inline double relaxed_value(const Laplacian1::Row& row, double current, double delta, Lookup&& value_of) {
    double acc = 0.0;
    for (std::size_t k = 0; k < row.columns.size(); ++k) acc += row.values[k] * value_of(row.columns[k]);
    return current - delta * acc;
}

/// max(a, b) that keeps a NaN once one has been seen.
inline double max_keep_nan(double a, double b) { return (std::isnan(b) || b > a) ? b : a; }

/// Called after every step with (k, y^k).
using IterateObserver = std::function<void(std::int64_t, const Eigen::VectorXd&)>;

/// y^{k+1} = y^k - delta L1 y^k from initial_vector(|E|, seed) until the
/// ConvergenceMonitor accepts. Throws MaxIterationsExceeded (carrying the
/// last iterate) on the cap or on a non-finite update.
HarmonicResult iterate_harmonic(const Laplacian1& laplacian, const HarmonicConfig& config,
                                const IterateObserver& observer = {});

/// Orthogonal projection of y0 onto ker L1 from a dense full-pivot LU null
/// space. Reference for tests; throws ScaleExceeded above `max_edges`.
Eigen::VectorXd project_onto_kernel_reference(const Laplacian1& laplacian, const Eigen::VectorXd& y0,
                                              Index max_edges = 500);

}  // namespace hodge
