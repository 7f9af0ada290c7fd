#include "pkpir/gf.hpp"

#include <string>

#include "pkpir/errors.hpp"

namespace pkpir {

std::uint32_t Field::polynomial_for(std::uint32_t width) {
    // One fixed primitive polynomial per width (the classic minimum-weight
    // table, x is a generator for each), so tables are stable.
    switch (width) {
        case 1:  return 0x3;       // x + 1
        case 2:  return 0x7;       // x^2 + x + 1
        case 3:  return 0xB;       // x^3 + x + 1
        case 4:  return 0x13;      // x^4 + x + 1
        case 5:  return 0x25;      // x^5 + x^2 + 1
        case 6:  return 0x43;      // x^6 + x + 1
        case 7:  return 0x89;      // x^7 + x^3 + 1
        case 8:  return 0x11D;     // x^8 + x^4 + x^3 + x^2 + 1
        case 9:  return 0x211;     // x^9 + x^4 + 1
        case 10: return 0x409;     // x^10 + x^3 + 1
        case 11: return 0x805;     // x^11 + x^2 + 1
        case 12: return 0x1053;    // x^12 + x^6 + x^4 + x + 1
        case 13: return 0x201B;    // x^13 + x^4 + x^3 + x + 1
        case 14: return 0x4443;    // x^14 + x^10 + x^6 + x + 1
        case 15: return 0x8003;    // x^15 + x + 1
        case 16: return 0x1100B;   // x^16 + x^12 + x^3 + x + 1
        default:
            throw WidthError("field width must be in [1, 16], got " + std::to_string(width));
    }
}

Field::Field(std::uint32_t width)
    : width_(width),
      order_(1u << width),
      poly_(polynomial_for(width)),
      exp_(2 * (static_cast<std::size_t>(1u << width) - 1)),
      log_(1u << width, 0) {
    // exp_[i] = x^i; filling by repeated multiplication by x with reduction.
    std::uint32_t v = 1;
    for (std::uint32_t i = 0; i + 1 < order_; ++i) {
        exp_[i] = static_cast<Fe>(v);
        log_[v] = i;
        v <<= 1;
        if (v & order_) {
            v ^= poly_;
        }
    }
    if (v != 1) {
        throw InternalError("polynomial for width " + std::to_string(width) +
                            " is not primitive");
    }
    for (std::uint32_t i = 0; i + 1 < order_; ++i) {
        exp_[i + order_ - 1] = exp_[i];
    }
}

Fe Field::inv(Fe a) const {
    if (a == 0) {
        throw DomainError("zero has no multiplicative inverse");
    }
    return exp_[(order_ - 1 - log_[a]) % (order_ - 1)];
}

Fe Field::pow(Fe a, std::uint64_t e) const {
    if (e == 0) {
        return 1;
    }
    if (a == 0) {
        return 0;
    }
    const std::uint64_t le = (static_cast<std::uint64_t>(log_[a]) * e) % (order_ - 1);
    return exp_[le];
}

}  // namespace pkpir
