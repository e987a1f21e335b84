#include "gna/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gna/errors.hpp"

namespace gna {

double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// ln Gamma(x) via the Lanczos approximation (g=7, n=9 coefficients).
static double log_gamma(double x) {
    static const double coef[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection formula
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = coef[0];
    double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

// Regularized lower incomplete gamma P(a,x) by series expansion (x < a+1).
static double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by continued fraction (x >= a+1).
static double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - log_gamma(a));
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DomainError("gamma_q: requires a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_squared_sf(double x, double df) {
    if (df <= 0.0) throw DomainError("chi_squared_sf: df must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

double chi_squared_gof_pvalue(std::span<const double> observed,
                              std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw DomainError("chi_squared_gof_pvalue: size mismatch or empty input");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0)
            throw DomainError("chi_squared_gof_pvalue: expected counts must be positive");
        const double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    const double df = static_cast<double>(observed.size()) - 1.0;
    if (df <= 0.0) return 1.0;
    return chi_squared_sf(stat, df);
}

double rank_sum_p_less(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("rank_sum_p_less: empty sample");
    struct Entry {
        double value;
        int group;  // 0 = a, 1 = b
    };
    std::vector<Entry> all;
    all.reserve(a.size() + b.size());
    for (double v : a) all.push_back({v, 0});
    for (double v : b) all.push_back({v, 1});
    std::sort(all.begin(), all.end(),
              [](const Entry& x, const Entry& y) { return x.value < y.value; });

    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double n = n1 + n2;

    // Assign mid-ranks, accumulate the tie correction term sum(t^3 - t).
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j + 1 < all.size() && all[j + 1].value == all[i].value) ++j;
        const double t = static_cast<double>(j - i + 1);
        const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (all[k].group == 0) rank_sum_a += mid_rank;
        }
        tie_term += t * t * t - t;
        i = j + 1;
    }

    // Mann-Whitney U for group a; small U -> a smaller than b.
    const double u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    const double mu = n1 * n2 / 2.0;
    double sigma2 = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (sigma2 <= 0.0) return 1.0;  // every observation tied
    // continuity correction toward the mean
    const double z = (u - mu + 0.5) / std::sqrt(sigma2);
    return 1.0 - normal_sf(z);  // P(U <= u) under H0
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("mean: empty input");
    double total = 0.0;
    for (double x : xs) total += x;
    return total / static_cast<double>(xs.size());
}

double median(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("median: empty input");
    std::vector<double> copy(xs.begin(), xs.end());
    std::sort(copy.begin(), copy.end());
    const std::size_t n = copy.size();
    if (n % 2 == 1) return copy[n / 2];
    return 0.5 * (copy[n / 2 - 1] + copy[n / 2]);
}

}  // namespace gna
