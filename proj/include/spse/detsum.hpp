#pragma once

#include <cstddef>
#include <span>

namespace spse {

// Deterministic pairwise reduction. The recursion tree depends only on the
// length, so a sum is bit-identical across runs regardless of how the data
// was produced. Used by every quadrature and inner product in the project.

namespace detail {

inline double pairwise_sum_impl(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(x, half) + pairwise_sum_impl(x + half, n - half);
}

inline double pairwise_dot_impl(const double* a, const double* b, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_dot_impl(a, b, half) + pairwise_dot_impl(a + half, b + half, n - half);
}

}  // namespace detail

inline double pairwise_sum(std::span<const double> x) {
    return detail::pairwise_sum_impl(x.data(), x.size());
}

inline double pairwise_dot(std::span<const double> a, std::span<const double> b) {
    return detail::pairwise_dot_impl(a.data(), b.data(), a.size());
}

}  // namespace spse
