#pragma once

#include <cstdint>
#include <vector>

namespace pkpir {

/// A field element value. The field it lives in is carried by the Field
/// object operating on it; bulk containers (messages, codewords) store raw
/// values and keep one width for the lot.
using Fe = std::uint16_t;

/// GF(2^w) for w in [1, 16]. Addition is bitwise XOR; multiplication is
/// log/exp table lookup modulo a fixed primitive polynomial per width, so
/// codewords are bit-reproducible across runs and implementations.
///
/// Immutable after construction; shareable across threads.
class Field {
public:
    explicit Field(std::uint32_t width);

    std::uint32_t width() const { return width_; }
    std::uint32_t order() const { return order_; }

    /// The defining polynomial, leading bit included (e.g. 0x13 for w=4).
    std::uint32_t modulus() const { return poly_; }

    static Fe add(Fe a, Fe b) { return a ^ b; }
    static Fe sub(Fe a, Fe b) { return a ^ b; }  // characteristic 2

    Fe mul(Fe a, Fe b) const {
        if (a == 0 || b == 0) {
            return 0;
        }
        return exp_[log_[a] + log_[b]];
    }

    Fe inv(Fe a) const;

    Fe div(Fe a, Fe b) const { return mul(a, inv(b)); }

    Fe pow(Fe a, std::uint64_t e) const;

    /// alpha^i for the generator alpha = x (the element 2, or 1 when w = 1).
    Fe exp(std::uint32_t i) const { return exp_[i % (order_ - 1)]; }

    /// Primitive polynomial used for a given width, leading bit included.
    static std::uint32_t polynomial_for(std::uint32_t width);

private:
    std::uint32_t width_;
    std::uint32_t order_;
    std::uint32_t poly_;
    std::vector<Fe> exp_;           // 2*(order-1) entries, doubled to skip a modulo
    std::vector<std::uint32_t> log_;  // order entries; log_[0] unused
};

}  // namespace pkpir
