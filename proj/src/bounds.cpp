#include "ddcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace ddcert {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxBisect = 200;

void check_query(std::size_t k, double beta, std::size_t N, const char* what) {
    if (N == 0) throw std::invalid_argument(std::string(what) + ": N must be >= 1");
    if (k > N) throw std::invalid_argument(std::string(what) + ": k must not exceed N");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument(std::string(what) + ": beta must lie in (0,1)");
}

double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Running log-sum-exp.
struct LogSum {
    double max = kNegInf;
    double scaled = 0.0;  // sum of exp(term - max)

    void add(double t) {
        if (t == kNegInf) return;
        if (t <= max) {
            scaled += std::exp(t - max);
        } else {
            scaled = scaled * std::exp(max - t) + 1.0;
            max = t;
        }
    }
    double value() const { return max == kNegInf ? kNegInf : max + std::log(scaled); }
};

// log of the compression-bound left-hand side.
double log_compression_lhs(std::size_t k, double beta, std::size_t N, double eps) {
    const double dn = static_cast<double>(N);
    const double dk = static_cast<double>(k);
    const double l1e = std::log1p(-eps);
    const double log_cnk = log_choose(dn, dk);
    LogSum low, high;
    for (std::size_t m = k; m < N; ++m) {
        const double dm = static_cast<double>(m);
        low.add(log_choose(dm, dk) - log_cnk + (dm - dn) * l1e);
    }
    for (std::size_t m = N + 1; m <= 4 * N; ++m) {
        const double dm = static_cast<double>(m);
        high.add(log_choose(dm, dk) - log_cnk + (dm - dn) * l1e);
    }
    LogSum total;
    total.add(std::log(beta / (2.0 * dn)) + low.value());
    total.add(std::log(beta / (6.0 * dn)) + high.value());
    return total.value();
}

// Bisection for the sign change of f on [lo, hi]; f(lo) < 0 < f(hi) or the
// reverse. Stops when the midpoint no longer moves.
template <class F>
double bisect(F&& f, double lo, double hi) {
    const bool rising = f(lo) < 0.0;
    for (int i = 0; i < kMaxBisect; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((f(mid) < 0.0) == rising) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double compression_lhs(std::size_t k, double beta, std::size_t N, double eps) {
    check_query(k, beta, N, "compression_lhs");
    if (k == N) throw std::invalid_argument("compression_lhs: defined for k < N only");
    return std::exp(log_compression_lhs(k, beta, N, eps));
}

double epsilon_compression(std::size_t k, double beta, std::size_t N) {
    check_query(k, beta, N, "epsilon_compression");
    if (k == N) return 1.0;
    const double lo = static_cast<double>(k) / static_cast<double>(N);
    const double hi = 1.0 - 1e-12;
    auto f = [&](double e) { return log_compression_lhs(k, beta, N, e); };  // compared against log 1 = 0
    const double flo = f(lo), fhi = f(hi);
    if (!(flo < 0.0 && fhi > 0.0)) {
        std::ostringstream msg;
        msg << "epsilon_compression: no sign change on [" << lo << ", " << hi << "] for k=" << k << " beta=" << beta
            << " N=" << N << " (LHS " << std::exp(flo) << " and " << std::exp(fhi) << ")";
        throw BoundError(msg.str());
    }
    return bisect(f, lo, hi);
}

double log_binomial_tail(std::size_t r, std::size_t N, double eps) {
    if (r >= N) return 0.0;
    if (eps <= 0.0) return 0.0;
    if (eps >= 1.0) return kNegInf;
    const double dn = static_cast<double>(N);
    const double le = std::log(eps), l1e = std::log1p(-eps);
    LogSum s;
    for (std::size_t i = 0; i <= r; ++i) {
        const double di = static_cast<double>(i);
        s.add(log_choose(dn, di) + di * le + (dn - di) * l1e);
    }
    return std::min(0.0, s.value());
}

double epsilon_direct(std::size_t r, double beta, std::size_t N) {
    check_query(r, beta, N, "epsilon_direct");
    if (r == N) return 1.0;
    const double target = std::log(beta / static_cast<double>(N));
    // Tail decreases from 1 to 0, so f rises through zero.
    auto f = [&](double e) { return target - log_binomial_tail(r, N, e); };
    return bisect(f, 0.0, 1.0);
}

std::vector<BoundRow> bound_comparison_table(double beta, const std::vector<std::size_t>& ns, std::size_t k) {
    std::vector<BoundRow> rows;
    rows.reserve(ns.size());
    for (auto n : ns) {
        BoundRow row;
        row.n = n;
        row.eps_compression = epsilon_compression(k, beta, n);
        row.eps_direct = epsilon_direct(k > 0 ? k - 1 : 0, beta, n);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ddcert
