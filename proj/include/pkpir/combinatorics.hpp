#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace pkpir {

// Exact arithmetic for every closed-form quantity in the protocol: download
// cost, capacity, query counts, message length, field-size requirements.
// No floating point anywhere on these paths; doubles appear only in display
// helpers.

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational, always in lowest terms with positive denominator
/// (cpp_rational maintains both invariants on every operation).
using Rational = boost::multiprecision::cpp_rational;

inline BigInt rational_num(const Rational& r) { return numerator(r); }
inline BigInt rational_den(const Rational& r) { return denominator(r); }

/// "3/2", or just "3" when the denominator is 1.
std::string rational_str(const Rational& r);

double rational_to_double(const Rational& r);

BigInt ipow(std::uint64_t base, std::uint64_t exp);

BigInt binomial(std::uint64_t n, std::uint64_t k);

/// Per-database geometry of the uniform-prefetching scheme.
struct SchemeCounts {
    std::uint32_t big_n = 0;  // databases
    std::uint32_t big_k = 0;  // messages
    std::uint32_t big_m = 0;  // cache size (messages)
    BigInt p;             // queried symbols per database
    BigInt q;             // of those, symbols determined by cached side information
    BigInt length;        // symbols per message, L = N^(K-m)
    BigInt code_length;   // 2p - q
    BigInt parity_per_db; // p - q

    std::uint32_t per_db_cached() const { return big_m / big_n; }  // m = M/N
};

/// Optimal normalized download cost D* = 1 + 1/N + ... + 1/N^(K-M-1).
/// Throws DomainError unless N >= 2, K >= 1, 0 <= M < K.
Rational optimal_cost(std::uint32_t n, std::uint32_t k, std::uint32_t m);

/// Capacity C = 1/D*.
Rational capacity(std::uint32_t n, std::uint32_t k, std::uint32_t m);

/// Download cost without any cache; equals optimal_cost(n, k, 0).
Rational classical_cost(std::uint32_t n, std::uint32_t k);

/// Download cost when every database fully knows the cache contents, for a
/// cache of M whole messages: (1 - M/K) * classical_cost. Comparison helper
/// only; no protocol behind it.
Rational known_cache_cost(std::uint32_t n, std::uint32_t k, std::uint32_t m);

/// Closed-form counts for the uniform scheme:
///   p = (N^(K-m) - 1)/(N-1),  q = (N^((N-1)m) - 1)/(N-1),  L = N^(K-m)
/// with m = M/N. Verifies N(p-q)/L == optimal_cost before returning.
/// Throws NonUniformError when M % N != 0, DomainError otherwise.
SchemeCounts scheme_counts(std::uint32_t n, std::uint32_t k, std::uint32_t m);

/// Geometry of the variant that must conceal the entire cache from every
/// database: p~ = (N^K - 1)/(N-1), q~ = (N^M - 1)/(N-1), length 2p~ - q~.
/// Used only to compare field-size requirements.
struct HiddenCacheCounts {
    BigInt p;
    BigInt q;
    BigInt code_length;
};
HiddenCacheCounts fully_hidden_counts(std::uint32_t n, std::uint32_t k, std::uint32_t m);

/// Smallest w in [1, 16] with 2^w >= code_length, so a length-code_length
/// evaluation-point MDS code exists over GF(2^w).
std::uint32_t min_field_width(const SchemeCounts& counts);
std::uint32_t min_field_width(const BigInt& code_length);

}  // namespace pkpir
