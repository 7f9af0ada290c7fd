#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pkpir/combinatorics.hpp"
#include "pkpir/scheme.hpp"

namespace pkpir {

/// Two-sample chi-square over category frequencies. Categories whose pooled
/// count falls below `min_pooled` are merged into one remainder bucket.
struct ChiSquareResult {
    double statistic = 0.0;
    std::uint32_t df = 0;
    double p_value = 1.0;
    std::uint32_t categories = 0;
};
ChiSquareResult two_sample_chi_square(const std::map<std::string, std::uint64_t>& a,
                                      const std::map<std::string, std::uint64_t>& b,
                                      std::uint64_t min_pooled = 8);

enum class AuditMode { Structural, Statistical };

struct PrivacyReport {
    AuditMode mode = AuditMode::Structural;
    std::uint32_t big_n = 0, big_k = 0, big_m = 0;
    std::uint32_t db = 0;
    bool pass = false;
    std::uint64_t cases = 0;            // (theta, H) pairs examined
    std::vector<std::string> failures;  // empty on pass
    std::string details;

    // statistical mode only
    std::uint64_t samples = 0;
    double alpha = 0.0;
    ChiSquareResult test;       // whole-table canonical forms
    ChiSquareResult edge_test;  // (first row, last row) support pairs
    bool retried = false;
    ChiSquareResult retry_test;
    ChiSquareResult retry_edge_test;
};

/// Exhaustively enumerates every (theta, H) admissible for database `db`
/// with each possible H_db held fixed, builds canonical tables, and checks
/// that (a) all structural signatures within an H_db class coincide and
/// (b) every table satisfies the count identities: each r-subset of the
/// active messages appears in exactly (N-1)^(r-1) rows, symbol indices are
/// distinct per message, and row/known/desired totals match p, q, L/N.
/// Throws BudgetError when the grid exceeds 10^4 pairs.
PrivacyReport audit_privacy_structural(std::uint32_t big_n, std::uint32_t big_k,
                                       std::uint32_t big_m, std::uint32_t db,
                                       Mutation mutation = Mutation::None);

/// Samples realized (permuted, shuffled) tables for two admissible desired
/// indices sharing the same cached sets and compares frequencies with
/// two-sample chi-squares at significance `alpha`, over two statistics:
/// whole-table canonical forms (sparse categories merge into a remainder
/// bucket) and (first row, last row) support pairs, which stay dense at any
/// size and catch positional shuffle defects. A rejection is re-tested once
/// on fresh samples so seed-grid false positives stay near alpha^2 per
/// statistic; a genuine leak rejects both times.
PrivacyReport audit_privacy_statistical(std::uint32_t big_n, std::uint32_t big_k,
                                        std::uint32_t big_m, std::uint32_t db,
                                        std::uint64_t samples, double alpha,
                                        std::uint64_t seed,
                                        Mutation mutation = Mutation::None);

struct GridPoint {
    std::uint32_t big_n = 0, big_k = 0, big_m = 0;
};

struct GridCase {
    GridPoint point;
    std::uint32_t theta = 0;
    std::uint64_t seed = 0;
    bool decode_ok = false;
    bool exact_ratio = false;
    std::string ratio;     // downloaded/L in lowest terms
    std::string expected;  // Theorem-1 cost
};

struct GridReport {
    bool pass = false;
    std::uint64_t runs = 0;
    std::vector<GridCase> cases;
    std::vector<std::string> failures;
};

/// Runs full retrievals with random stores over every grid point and every
/// admissible theta; checks symbol-exact decoding and that the measured
/// download ratio equals the Theorem-1 cost as a Rational.
GridReport audit_capacity_grid(const std::vector<GridPoint>& points, std::uint32_t repeats,
                               std::uint64_t seed, std::uint32_t jobs = 1);

/// N in {2,3}, K in 2..6, m in {0,1,2} with M = N*m < K.
std::vector<GridPoint> default_grid();

}  // namespace pkpir
