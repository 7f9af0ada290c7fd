#include "pkpir/combinatorics.hpp"

#include <sstream>

#include "pkpir/errors.hpp"

namespace pkpir {

std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) {
        os << '/' << denominator(r);
    }
    return os.str();
}

double rational_to_double(const Rational& r) {
    return rational_num(r).convert_to<double>() / rational_den(r).convert_to<double>();
}

BigInt ipow(std::uint64_t base, std::uint64_t exp) {
    BigInt out = 1;
    const BigInt b = base;
    for (std::uint64_t i = 0; i < exp; ++i) {
        out *= b;
    }
    return out;
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) {
        return 0;
    }
    if (k > n - k) {
        k = n - k;
    }
    BigInt out = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        out *= BigInt(n - k + i);
        out /= BigInt(i);  // exact: out is binomial(n-k+i, i) here
    }
    return out;
}

namespace {

void check_domain(std::uint32_t n, std::uint32_t k, std::uint32_t m) {
    if (n < 2) {
        throw DomainError("need at least 2 databases, got N=" + std::to_string(n));
    }
    if (k < 1) {
        throw DomainError("need at least 1 message, got K=" + std::to_string(k));
    }
    if (m >= k) {
        throw DomainError("cache must leave something to retrieve: M=" + std::to_string(m) +
                          " >= K=" + std::to_string(k));
    }
}

}  // namespace

Rational optimal_cost(std::uint32_t n, std::uint32_t k, std::uint32_t m) {
    check_domain(n, k, m);
    // Geometric accumulation; the closed form (1 - (1/N)^(K-M)) / (1 - 1/N)
    // is asserted equal in the tests.
    Rational sum = 0;
    Rational term = 1;
    const Rational inv_n(1, n);
    for (std::uint32_t i = 0; i < k - m; ++i) {
        sum += term;
        term *= inv_n;
    }
    return sum;
}

Rational capacity(std::uint32_t n, std::uint32_t k, std::uint32_t m) {
    return Rational(1) / optimal_cost(n, k, m);
}

Rational classical_cost(std::uint32_t n, std::uint32_t k) {
    return optimal_cost(n, k, 0);
}

Rational known_cache_cost(std::uint32_t n, std::uint32_t k, std::uint32_t m) {
    check_domain(n, k, m);
    return (Rational(1) - Rational(m, k)) * classical_cost(n, k);
}

SchemeCounts scheme_counts(std::uint32_t n, std::uint32_t k, std::uint32_t m) {
    check_domain(n, k, m);
    if (m % n != 0) {
        throw NonUniformError("uniform prefetching needs M divisible by N: M=" +
                              std::to_string(m) + ", N=" + std::to_string(n));
    }
    const std::uint32_t per_db = m / n;
    if (k < per_db + 1) {
        throw DomainError("K - M/N must be at least 1");
    }

    SchemeCounts c;
    c.big_n = n;
    c.big_k = k;
    c.big_m = m;

    const BigInt n_minus_1 = n - 1;
    const BigInt pn = ipow(n, k - per_db);  // N^(K-m)
    const BigInt qn = ipow(n, static_cast<std::uint64_t>(n - 1) * per_db);  // N^((N-1)m)
    if ((pn - 1) % n_minus_1 != 0 || (qn - 1) % n_minus_1 != 0) {
        throw InternalError("geometric sums must divide exactly");
    }
    c.p = (pn - 1) / n_minus_1;
    c.q = (qn - 1) / n_minus_1;
    c.length = pn;
    c.code_length = 2 * c.p - c.q;
    c.parity_per_db = c.p - c.q;

    // N(p-q)/L must telescope to the Theorem-1 cost exactly.
    const Rational ratio = Rational(n * c.parity_per_db, c.length);
    if (ratio != optimal_cost(n, k, m)) {
        throw InternalError("scheme counts disagree with the closed-form cost");
    }
    return c;
}

HiddenCacheCounts fully_hidden_counts(std::uint32_t n, std::uint32_t k, std::uint32_t m) {
    check_domain(n, k, m);
    const BigInt n_minus_1 = n - 1;
    HiddenCacheCounts h;
    h.p = (ipow(n, k) - 1) / n_minus_1;
    h.q = (ipow(n, m) - 1) / n_minus_1;
    h.code_length = 2 * h.p - h.q;
    return h;
}

std::uint32_t min_field_width(const BigInt& code_length) {
    if (code_length < 1) {
        throw DomainError("code length must be positive");
    }
    for (std::uint32_t w = 1; w <= 16; ++w) {
        if (ipow(2, w) >= code_length) {
            return w;
        }
    }
    throw DomainError("code length " + code_length.str() + " exceeds GF(2^16)");
}

std::uint32_t min_field_width(const SchemeCounts& counts) {
    return min_field_width(counts.code_length);
}

}  // namespace pkpir
