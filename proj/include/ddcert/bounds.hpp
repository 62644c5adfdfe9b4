#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ddcert {

class BoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Risk level for a compression set of size k out of N samples at confidence
/// 1 - beta. Returns 1 for k == N.
double epsilon_compression(std::size_t k, double beta, std::size_t N);

/// Left-hand side of the compression-bound equation at eps (k < N).
double compression_lhs(std::size_t k, double beta, std::size_t N, double eps);

/// Risk level from r violating samples out of N: the eps at which the
/// binomial tail P[Bin(N, eps) <= r] equals beta / N. Returns 1 for r == N.
double epsilon_direct(std::size_t r, double beta, std::size_t N);

/// log P[Bin(N, eps) <= r].
double log_binomial_tail(std::size_t r, std::size_t N, double eps);

struct BoundRow {
    std::size_t n = 0;
    double eps_compression = 0.0;
    double eps_direct = 0.0;
};

/// eps_compression(k) next to eps_direct(max(k-1, 0)) for each N.
std::vector<BoundRow> bound_comparison_table(double beta, const std::vector<std::size_t>& ns, std::size_t k);

}  // namespace ddcert
