#pragma once

#include <array>
#include <cmath>
#include <algorithm>
#include <vector>

#include "noisestab/errors.hpp"

namespace noisestab::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// 15-point Kronrod nodes on [0,1] (symmetric), with embedded 7-point Gauss.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
Segment gauss_kronrod15(F&& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over the
/// consecutive pieces [breaks[i], breaks[i+1]]. Bisects the segment with the
/// largest error estimate until the summed estimate drops below
/// max(abs_tol, rel_tol * |I|). Throws NumericalFailure when max_intervals is
/// exhausted first.
template <typename F>
Result integrate(F&& f, const std::vector<double>& breaks, double rel_tol, double abs_tol = 0.0,
                 int max_intervals = 4000) {
    std::vector<detail::Segment> heap;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) heap.push_back(detail::gauss_kronrod15(f, breaks[i], breaks[i + 1]));
    std::make_heap(heap.begin(), heap.end());
    auto resum = [&](double& value, double& err) {
        value = 0.0;
        err = 0.0;
        for (const auto& seg : heap) {
            value += seg.value;
            err += seg.error;
        }
    };
    double total = 0.0;
    double error = 0.0;
    resum(total, error);
    int count = static_cast<int>(heap.size());
    for (;;) {
        if (error <= std::max(abs_tol, rel_tol * std::abs(total))) {
            // The running sums drift by rounding; confirm before stopping.
            resum(total, error);
            if (error <= std::max(abs_tol, rel_tol * std::abs(total))) break;
        }
        if (count >= max_intervals) {
            resum(total, error);
            throw NumericalFailure("adaptive quadrature: tolerance not reached within " +
                                   std::to_string(max_intervals) + " intervals (estimate " +
                                   std::to_string(error) + ")");
        }
        std::pop_heap(heap.begin(), heap.end());
        const auto worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gauss_kronrod15(f, worst.a, mid);
        auto right = detail::gauss_kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        ++count;
        if (count % 256 == 0) resum(total, error);
    }
    double value = 0.0;
    double err = 0.0;
    resum(value, err);
    return {value, err, count};
}

template <typename F>
Result integrate(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                 int max_intervals = 4000) {
    return integrate(std::forward<F>(f), std::vector<double>{a, b}, rel_tol, abs_tol,
                     max_intervals);
}

}  // namespace noisestab::quad
