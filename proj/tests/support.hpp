#pragma once

// Shared helpers for the test suites: KS statistics, analytic reference
// distributions (Boost.Math, independent of the library's own density
// code), and small samplers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

namespace testsupport {

/// Sup distance between the empirical CDF of a sample and a reference CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = double(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(double(i + 1) / n - f));
        d = std::max(d, std::fabs(double(i) / n - f));
    }
    return d;
}

/// Sup distance between an empirical CDF and a piecewise-linear CDF given
/// by grid points/values (evaluated at the sample points).
inline double ks_distance_grid(std::vector<double> sample,
                               const std::vector<double>& pts,
                               const std::vector<double>& cdf) {
    auto interp = [&](double x) {
        if (x <= pts.front()) return 0.0;
        if (x >= pts.back()) return 1.0;
        const auto it = std::upper_bound(pts.begin(), pts.end(), x);
        const std::size_t hi = std::size_t(it - pts.begin());
        const double t = (x - pts[hi - 1]) / (pts[hi] - pts[hi - 1]);
        return cdf[hi - 1] + t * (cdf[hi] - cdf[hi - 1]);
    };
    return ks_distance(std::move(sample), interp);
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

inline double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / double(v.size() - 1));
}

}  // namespace testsupport
