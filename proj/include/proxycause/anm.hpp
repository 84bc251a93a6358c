#pragma once
#ifndef PROXYCAUSE_ANM_HPP
#define PROXYCAUSE_ANM_HPP

// Additive-noise-model direction engine. For each orientation, fit
// effect = F(cause) + noise by kernel ridge regression on one half of the
// sample and test residual independence on the other half. The orientation
// whose residuals look more independent of the input wins.

#include "proxycause/independence.hpp"

namespace proxycause {

struct AnmConfig {
    double ridge_lambda = 1e-3;
    int num_permutations = 499;
    double fit_fraction = 0.5;

    void validate() const {
        if (!(ridge_lambda > 0.0) || !std::isfinite(ridge_lambda))
            throw std::invalid_argument("ridge_lambda must be positive");
        if (num_permutations < 99)
            throw std::invalid_argument("num_permutations must be at least 99");
        if (!(fit_fraction > 0.0 && fit_fraction < 1.0))
            throw std::invalid_argument("fit_fraction must lie in (0, 1)");
    }
};

/// Gaussian-kernel ridge regressor F(x) = offset + sum_i coef_i k(x, x_i).
class Regressor {
public:
    Regressor(std::vector<double> inputs, std::vector<double> coefficients, KernelSpec kernel, double offset = 0.0)
        : inputs_(std::move(inputs)), coef_(std::move(coefficients)), kernel_(kernel), offset_(offset) {
        if (inputs_.size() != coef_.size())
            throw std::invalid_argument("Regressor: coefficient count must equal input count");
    }

    double operator()(double x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < inputs_.size(); ++i)
            s += coef_[i] * kernel_(x, inputs_[i]);
        return offset_ + s;
    }

    std::vector<double> predict(std::span<const double> xs) const {
        std::vector<double> out(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i] = (*this)(xs[i]);
        return out;
    }

    const std::vector<double>& inputs() const { return inputs_; }
    const std::vector<double>& coefficients() const { return coef_; }
    const KernelSpec& kernel() const { return kernel_; }
    double offset() const { return offset_; }

private:
    std::vector<double> inputs_;
    std::vector<double> coef_;
    KernelSpec kernel_;
    double offset_ = 0.0;
};

namespace detail {
inline void check_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw DataError(std::string(what) + ": non-finite input");
}
} // namespace detail

/// Minimizes sum (y - F(x))^2 + lambda ||F||^2 over the RKHS of a Gaussian
/// kernel with median-heuristic bandwidth on x, with an unpenalized constant
/// offset: offset = mean(y), coef = (K + lambda I)^-1 (y - offset).
inline Regressor kernel_ridge_fit(std::span<const double> x, std::span<const double> y, double lambda) {
    if (x.size() != y.size())
        throw std::invalid_argument("kernel_ridge_fit: length mismatch");
    if (x.size() < 10)
        throw std::invalid_argument("kernel_ridge_fit: need at least 10 points");
    detail::check_finite(x, "kernel_ridge_fit");
    detail::check_finite(y, "kernel_ridge_fit");
    if (!(lambda > 0.0))
        throw std::invalid_argument("kernel_ridge_fit: lambda must be positive");

    const KernelSpec kernel(median_heuristic(x));
    Eigen::MatrixXd k = gram_matrix(x, kernel);
    k.diagonal().array() += lambda;
    const double offset = mean(y);
    const Eigen::VectorXd rhs =
        Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())).array() - offset;
    const Eigen::VectorXd coef = k.ldlt().solve(rhs);
    if (!coef.allFinite())
        throw DataError("kernel_ridge_fit: solve failed");
    return Regressor(std::vector<double>(x.begin(), x.end()), std::vector<double>(coef.data(), coef.data() + coef.size()),
                     kernel, offset);
}

inline Regressor kernel_ridge_fit(std::span<const double> x, std::span<const double> y, const AnmConfig& cfg) {
    return kernel_ridge_fit(x, y, cfg.ridge_lambda);
}

/// r_i = y_i - F(x_i).
inline std::vector<double> residuals(const Regressor& reg, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("residuals: length mismatch");
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        r[i] = y[i] - reg(x[i]);
    return r;
}

/// Both independence p-values alongside the verdict.
struct AnmResult {
    Direction direction;
    double p_forward = 1.0;  ///< p-value of a independent of residual(b | a)
    double p_backward = 1.0; ///< p-value of b independent of residual(a | b)
    double z_forward = 0.0;
    double z_backward = 0.0;
};

inline AnmResult anm_test(const ScatterSample& sample, const AnmConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const std::size_t n = sample.size();
    if (n < 20)
        throw DataError("anm_direction: need at least 20 points, got " + std::to_string(n));
    const std::vector<double> a = standardize(sample.column_a());
    const std::vector<double> b = standardize(sample.column_b());

    // The split and the permutation schedule depend only on (seed, n), so
    // swapping the coordinates swaps the two p-values exactly.
    Rng split_rng(derive_seed(seed, "anm/split"));
    const auto order = split_rng.permutation(n);
    const auto n_fit = std::clamp<std::size_t>(static_cast<std::size_t>(cfg.fit_fraction * static_cast<double>(n)), 10,
                                               n - 5);
    std::vector<double> a_fit, b_fit, a_test, b_test;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = order[i];
        if (i < n_fit) {
            a_fit.push_back(a[j]);
            b_fit.push_back(b[j]);
        } else {
            a_test.push_back(a[j]);
            b_test.push_back(b[j]);
        }
    }
    const std::uint64_t hsic_seed = derive_seed(seed, "anm/hsic");

    auto independence_p = [&](const std::vector<double>& cause_fit, const std::vector<double>& effect_fit,
                              const std::vector<double>& cause_test, const std::vector<double>& effect_test) {
        const Regressor reg = kernel_ridge_fit(cause_fit, effect_fit, cfg.ridge_lambda);
        const auto r = residuals(reg, cause_test, effect_test);
        return hsic_test(cause_test, r, cfg.num_permutations, hsic_seed);
    };

    AnmResult out;
    const HsicTest fwd = independence_p(a_fit, b_fit, a_test, b_test);
    const HsicTest bwd = independence_p(b_fit, a_fit, b_test, a_test);
    out.p_forward = fwd.p_value;
    out.p_backward = bwd.p_value;
    out.z_forward = fwd.z_score;
    out.z_backward = bwd.z_score;
    const double floor = 1.0 / (1.0 + cfg.num_permutations);
    const double score = std::abs(std::log(std::max(out.p_forward, floor)) - std::log(std::max(out.p_backward, floor)));
    if (out.p_forward != out.p_backward) {
        out.direction = {out.p_forward > out.p_backward ? Verdict::XtoY : Verdict::YtoX, score, false};
        return out;
    }
    // Equal p-values (usually both at the permutation floor): the smaller
    // standardized statistic wins; score stays zero.
    if (out.z_forward != out.z_backward) {
        out.direction = {out.z_forward < out.z_backward ? Verdict::XtoY : Verdict::YtoX, 0.0, false};
        return out;
    }
    out.direction = {Verdict::XtoY, 0.0, true};
    return out;
}

inline Direction anm_direction(const ScatterSample& sample, const AnmConfig& cfg, std::uint64_t seed) {
    return anm_test(sample, cfg, seed).direction;
}

} // namespace proxycause

#endif
