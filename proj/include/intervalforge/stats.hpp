#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace intervalforge {

/// Inverse of the standard normal CDF.
/// Acklam's rational approximation, polished with one Halley step on erfc
/// so the result is accurate to near machine precision.
inline double norm_ppf(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("norm_ppf: p must lie in (0,1)");

    static const double a[] = { -3.969683028665376e+01,  2.209460984245205e+02,
                                -2.759285104469687e+02,  1.383577518672690e+02,
                                -3.066479806614716e+01,  2.506628277459239e+00 };
    static const double b[] = { -5.447609879822406e+01,  1.615858368580409e+02,
                                -1.556989798598866e+02,  6.680131188771972e+01,
                                -1.328068155288572e+01 };
    static const double c[] = { -7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00 };
    static const double d[] = {  7.784695709041462e-03,  3.224671290700398e-01,
                                 2.445134137142996e+00,  3.754408661907416e+00 };

    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0]*q+c[1])*q+c[2])*q+c[3])*q+c[4])*q+c[5]) /
            ((((d[0]*q+d[1])*q+d[2])*q+d[3])*q+1.0);
    } else if (p <= phigh) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0]*r+a[1])*r+a[2])*r+a[3])*r+a[4])*r+a[5])*q /
            (((((b[0]*r+b[1])*r+b[2])*r+b[3])*r+b[4])*r+1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0]*q+c[1])*q+c[2])*q+c[3])*q+c[4])*q+c[5]) /
             ((((d[0]*q+d[1])*q+d[2])*q+d[3])*q+1.0);
    }

    // Halley refinement against the exact CDF via erfc.
    double e = 0.5 * std::erfc(-x / M_SQRT2) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

/// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }

/// splitmix64 finalizer; used to derive named sub-seeds from the master seed.
inline std::uint64_t mix_seed(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Sub-seed scheme: master seed combined with a stream tag and a counter.
/// Tags keep the split / CV / conformal / synth streams independent.
inline std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t counter = 0)
{
    return mix_seed(master ^ mix_seed(tag) ^ (counter * 0x9e3779b97f4a7c15ULL));
}

namespace seed_tag {
constexpr std::uint64_t split    = 1;
constexpr std::uint64_t cv       = 2;
constexpr std::uint64_t conformal = 3;
constexpr std::uint64_t synth    = 4;
constexpr std::uint64_t sweep    = 5;
} // namespace seed_tag

} // namespace intervalforge
