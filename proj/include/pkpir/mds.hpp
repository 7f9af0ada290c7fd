#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pkpir/gf.hpp"

namespace pkpir {

/// Systematic (n, k) Reed-Solomon evaluation code over GF(2^w).
///
/// Codeword: c_i = f(x_i) where f is the unique polynomial of degree < k
/// with f(x_i) = data_i for i < k. Evaluation points are the field elements
/// 0, 1, ..., n-1, so positions 0..k-1 carry the data verbatim and any k
/// positions determine the codeword (MDS).
///
/// Immutable after construction; shareable across threads.
class SystematicCode {
public:
    /// Throws WidthError when 2^width < n, LengthError when k > n or k == 0.
    SystematicCode(std::uint32_t width, std::uint32_t k, std::uint32_t n);

    std::uint32_t k() const { return k_; }
    std::uint32_t n() const { return n_; }
    const Field& field() const { return field_; }

    /// Full codeword; prefix of length k equals the data.
    std::vector<Fe> encode(std::span<const Fe> data) const;

    /// Only the n-k parity symbols (positions k..n-1).
    std::vector<Fe> parity(std::span<const Fe> data) const;

    /// The unique systematic part consistent with k known (position, value)
    /// pairs. Positions must be distinct and in [0, n).
    std::vector<Fe> reconstruct(std::span<const std::pair<std::uint32_t, Fe>> known) const;

private:
    Field field_;
    std::uint32_t k_;
    std::uint32_t n_;
    // parity_row_[j][i] = l_i(x_{k+j}), the i-th Lagrange basis polynomial
    // through the systematic points evaluated at parity point j.
    std::vector<std::vector<Fe>> parity_rows_;

    void check_data(std::span<const Fe> data) const;
};

}  // namespace pkpir
