#include "chainreb/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace chainreb {

namespace {

bool rat_sq_leq(double d, const Rat& x) { // d*d <= x, exact
    if (d < 0) return true;
    Rat dr(d);
    return dr * dr <= x;
}

bool rat_sq_geq(double d, const Rat& x) { // d*d >= x, exact
    if (d < 0) return false;
    Rat dr(d);
    return dr * dr >= x;
}

} // namespace

double sqrt_lower(const Rat& x) {
    if (x <= 0) return 0.0;
    double guess = std::sqrt(static_cast<double>(x));
    if (!std::isfinite(guess)) guess = std::numeric_limits<double>::max();
    while (!rat_sq_leq(guess, x)) guess = std::nextafter(guess, 0.0);
    return guess;
}

double sqrt_upper(const Rat& x) {
    if (x <= 0) return 0.0;
    double guess = std::sqrt(static_cast<double>(x));
    if (!std::isfinite(guess)) guess = std::numeric_limits<double>::max();
    while (!rat_sq_geq(guess, x)) guess = std::nextafter(guess, std::numeric_limits<double>::infinity());
    return guess;
}

namespace {

Int pow_int(Int base, std::uint64_t e) {
    Int out(1);
    while (e > 0) {
        if (e & 1u) out *= base;
        base *= base;
        e >>= 1u;
    }
    return out;
}

// Certified 2e-th root upper bound for a positive integer x, returned as an
// exactly representable dyadic s / 2^20 with s^(2e) >= x * 2^(20*2e) verified
// in integers.
double root_upper(const Int& x, std::uint64_t two_e) {
    if (x <= 0) return 0.0;
    const int frac_bits = 20;
    double approx = std::exp2((static_cast<double>(msb(x)) + 1.0) / static_cast<double>(two_e));
    if (!std::isfinite(approx)) approx = std::numeric_limits<double>::max();
    Int s(static_cast<long long>(std::ceil(approx * static_cast<double>(1 << frac_bits))));
    if (s < 1) s = 1;
    const Int target = x << (static_cast<std::uint64_t>(frac_bits) * two_e);
    auto good = [&](const Int& cand) { return pow_int(cand, two_e) >= target; };
    while (!good(s)) s += std::max<Int>(Int(1), s >> 20);
    // shave excess while the certificate still holds
    while (s > 1) {
        Int next = s - std::max<Int>(Int(1), s >> 21);
        if (next < 1 || !good(next)) break;
        s = next;
    }
    return static_cast<double>(s) / static_cast<double>(1 << frac_bits);
}

// Deterministic double-precision power iteration on A^T A; returns an
// approximate top singular vector (unnormalized) of length cols(A).
std::vector<double> approx_top_vector(const IntMatrix& a, std::uint64_t iters) {
    const index_t n = a.cols();
    std::vector<double> v(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = 1.0 + 1.0 / static_cast<double>(i + 2);
    IntMatrix at = a.transpose();
    auto apply = [&](const IntMatrix& m, const std::vector<double>& x) {
        std::vector<double> out(static_cast<std::size_t>(m.rows()), 0.0);
        for (index_t r = 0; r < m.rows(); ++r)
            for (const auto& [c, w] : m.row(r))
                out[static_cast<std::size_t>(r)] +=
                    static_cast<double>(w) * x[static_cast<std::size_t>(c)];
        return out;
    };
    for (std::uint64_t it = 0; it < iters; ++it) {
        std::vector<double> w = apply(at, apply(a, v));
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0 || !std::isfinite(norm)) break;
        for (double& x : w) x /= norm;
        v = std::move(w);
    }
    return v;
}

// Exact Rayleigh quotient |A w|^2 / |w|^2 for the integer rounding of v.
Rat rayleigh_lower_sq(const IntMatrix& a, const std::vector<double>& v) {
    const index_t n = a.cols();
    std::vector<Int> w(static_cast<std::size_t>(n), Int(0));
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::fabs(x));
    if (scale == 0.0) return Rat(0);
    bool any = false;
    for (index_t i = 0; i < n; ++i) {
        double x = v[static_cast<std::size_t>(i)] / scale * 1048576.0;
        auto r = static_cast<long long>(std::llround(x));
        w[static_cast<std::size_t>(i)] = Int(r);
        if (r != 0) any = true;
    }
    if (!any) return Rat(0);
    std::vector<Int> aw = a.apply(w);
    Int num = 0, den = 0;
    for (const Int& x : aw) num += x * x;
    for (const Int& x : w) den += x * x;
    if (den == 0) return Rat(0);
    return Rat(num) / Rat(den);
}

} // namespace

NormEstimate operator_norm(const IntMatrix& a, double tol, const ResourceCaps& caps) {
    if (tol <= 0) throw shape_error("operator_norm tolerance must be positive");
    NormEstimate est;
    est.tolerance = tol;
    if (a.is_zero()) {
        est.converged = true;
        return est;
    }

    Int coarse_sq = a.max_abs_col_sum() * a.max_abs_row_sum();
    double upper = sqrt_upper(Rat(coarse_sq));

    std::uint64_t power_iters = std::min<std::uint64_t>(caps.max_norm_iterations, 60);
    std::vector<double> v = approx_top_vector(a, power_iters);
    double lower = sqrt_lower(rayleigh_lower_sq(a, v));
    lower = std::min(lower, upper);

    est.lower = lower;
    est.upper = upper;
    est.converged = upper <= lower * (1.0 + tol);
    if (est.converged) return est;

    // Gram-power refinement: for B = A^T A (or A A^T, whichever is smaller),
    // lambda_max(B)^e = lambda_max(B^e) <= |B^e|_inf, all exact.
    const bool use_cols = a.cols() <= a.rows();
    const index_t n = use_cols ? a.cols() : a.rows();
    if (n <= caps.max_refine_dim && n > 0) {
        IntMatrix at = a.transpose();
        IntMatrix b = use_cols ? (at * a) : (a * at);
        IntMatrix m = b;
        std::uint64_t e = 1;
        for (std::uint64_t round = 0; round < 24; ++round) {
            Int rowsum = m.max_abs_row_sum();
            if (rowsum == 0) break;
            if (msb(rowsum) + 1 > caps.max_entry_bits) break;
            double cand = root_upper(rowsum, 2 * e);
            est.upper = std::min(est.upper, cand);
            if (est.upper <= est.lower * (1.0 + tol)) {
                est.converged = true;
                break;
            }
            m = m * m;
            e *= 2;
        }
    }
    if (est.lower > est.upper) est.lower = est.upper;
    est.converged = est.upper <= est.lower * (1.0 + tol);
    return est;
}

} // namespace chainreb
