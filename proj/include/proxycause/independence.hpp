#pragma once
#ifndef PROXYCAUSE_INDEPENDENCE_HPP
#define PROXYCAUSE_INDEPENDENCE_HPP

// Gaussian kernels and the HSIC permutation test.

#include <Eigen/Dense>

#include "proxycause/core.hpp"

namespace proxycause {

/// Gaussian kernel k(u, v) = exp(-(u - v)^2 / (2 bandwidth^2)).
struct KernelSpec {
    double bandwidth = 1.0;

    explicit KernelSpec(double bw = 1.0) : bandwidth(bw) {
        if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
            throw std::invalid_argument("kernel bandwidth must be positive and finite");
    }

    double operator()(double u, double v) const {
        const double d = u - v;
        return std::exp(-d * d / (2.0 * bandwidth * bandwidth));
    }
};

/// Median of |v_i - v_j| over all pairs i < j. Inputs longer than
/// `max_points` are thinned to an evenly strided subsample first.
inline double median_heuristic(std::span<const double> values, std::size_t max_points = 1000) {
    if (values.size() < 2)
        throw DataError("median heuristic needs at least two values");
    std::vector<double> pts;
    if (values.size() > max_points) {
        pts.reserve(max_points);
        for (std::size_t i = 0; i < max_points; ++i)
            pts.push_back(values[i * values.size() / max_points]);
    } else {
        pts.assign(values.begin(), values.end());
    }
    std::vector<double> gaps;
    gaps.reserve(pts.size() * (pts.size() - 1) / 2);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            gaps.push_back(std::abs(pts[i] - pts[j]));
    const std::size_t m = gaps.size();
    std::nth_element(gaps.begin(), gaps.begin() + m / 2, gaps.end());
    double med = gaps[m / 2];
    if (m % 2 == 0) {
        const double lower = *std::max_element(gaps.begin(), gaps.begin() + m / 2);
        med = 0.5 * (med + lower);
    }
    if (!(med > 0.0)) {
        // More than half the pairs coincide (sparse count vectors do this);
        // use the median of the nonzero gaps instead.
        std::vector<double> nonzero;
        for (double g : gaps)
            if (g > 0.0)
                nonzero.push_back(g);
        if (nonzero.empty())
            throw DataError("degenerate sample");
        const std::size_t k = nonzero.size() / 2;
        std::nth_element(nonzero.begin(), nonzero.begin() + k, nonzero.end());
        med = nonzero[k];
    }
    return med;
}

inline Eigen::MatrixXd gram_matrix(std::span<const double> values, const KernelSpec& kernel) {
    const auto n = static_cast<Eigen::Index>(values.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j)
            k(i, j) = k(j, i) = kernel(values[i], values[j]);
    }
    return k;
}

/// H K H with H = I - (1/n) 1 1^T.
inline Eigen::MatrixXd double_center(const Eigen::MatrixXd& k) {
    const Eigen::VectorXd row_means = k.rowwise().mean();
    const Eigen::RowVectorXd col_means = k.colwise().mean();
    const double grand = k.mean();
    Eigen::MatrixXd c = k;
    c.colwise() -= row_means;
    c.rowwise() -= col_means;
    c.array() += grand;
    return c;
}

namespace detail {
inline void check_hsic_inputs(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw std::invalid_argument("hsic: length mismatch (" + std::to_string(u.size()) + " vs " +
                                    std::to_string(v.size()) + ")");
    if (u.size() < 5)
        throw std::invalid_argument("hsic: need at least 5 observations");
}

// sum_ij kc(i,j) * l(perm[i], perm[j])
inline double permuted_trace(const Eigen::MatrixXd& kc, const Eigen::MatrixXd& l, std::span<const std::size_t> perm) {
    const auto n = kc.rows();
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double* kcol = kc.col(j).data();
        const double* lcol = l.col(static_cast<Eigen::Index>(perm[j])).data();
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            s += kcol[i] * lcol[perm[i]];
        total += s;
    }
    return total;
}
} // namespace detail

/// Biased HSIC V-statistic trace(K H L H) / n^2.
inline double hsic_statistic(std::span<const double> u, std::span<const double> v, const KernelSpec& ku,
                             const KernelSpec& kv) {
    detail::check_hsic_inputs(u, v);
    const Eigen::MatrixXd kc = double_center(gram_matrix(u, ku));
    const Eigen::MatrixXd l = gram_matrix(v, kv);
    const double n = static_cast<double>(u.size());
    return std::max(0.0, (kc.cwiseProduct(l)).sum() / (n * n));
}

struct HsicTest {
    double statistic = 0.0;
    double p_value = 1.0;
    /// (observed - mean of permuted) / sd of permuted statistics; 0 when the
    /// permutation null is degenerate.
    double z_score = 0.0;
};

/// Permutation test of u independent of v. Kernels use the median heuristic
/// per variable; a constant variable gets bandwidth 1 (its centered Gram
/// matrix is zero, so the statistic is zero and p = 1). Only v is permuted,
/// and the permutation schedule depends on `seed` alone.
inline HsicTest hsic_test(std::span<const double> u, std::span<const double> v, int num_permutations,
                          std::uint64_t seed) {
    detail::check_hsic_inputs(u, v);
    if (num_permutations < 99)
        throw std::invalid_argument("hsic_pvalue: need at least 99 permutations");
    auto bandwidth = [](std::span<const double> x) {
        try {
            return median_heuristic(x);
        } catch (const DataError&) {
            return 1.0;
        }
    };
    const Eigen::MatrixXd kc = double_center(gram_matrix(u, KernelSpec(bandwidth(u))));
    const Eigen::MatrixXd l = gram_matrix(v, KernelSpec(bandwidth(v)));
    const std::size_t n = u.size();
    const double nn = static_cast<double>(n) * static_cast<double>(n);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = i;
    const double observed = detail::permuted_trace(kc, l, perm);
    // Permuted traces equal to the observed one up to rounding count as
    // exceedances; the tolerance is relative to the trace magnitude.
    const double tol = 1e-12 * std::max(1.0, kc.cwiseAbs().sum());

    Rng rng(seed);
    int exceed = 0;
    double sum = 0.0, sum_sq = 0.0;
    for (int p = 0; p < num_permutations; ++p) {
        rng.shuffle(perm);
        const double t = detail::permuted_trace(kc, l, perm);
        if (t >= observed - tol)
            ++exceed;
        sum += t;
        sum_sq += t * t;
    }
    const double null_mean = sum / num_permutations;
    const double null_var = std::max(0.0, sum_sq / num_permutations - null_mean * null_mean);
    const double null_sd = std::sqrt(null_var);
    const double z = null_sd > tol ? (observed - null_mean) / null_sd : 0.0;
    return {std::max(0.0, observed / nn), (1.0 + exceed) / (1.0 + num_permutations), z};
}

inline double hsic_pvalue(std::span<const double> u, std::span<const double> v, int num_permutations,
                          std::uint64_t seed) {
    return hsic_test(u, v, num_permutations, seed).p_value;
}

} // namespace proxycause

#endif
