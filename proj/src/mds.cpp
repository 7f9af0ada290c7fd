#include "pkpir/mds.hpp"

#include <string>

#include "pkpir/errors.hpp"

namespace pkpir {

SystematicCode::SystematicCode(std::uint32_t width, std::uint32_t k, std::uint32_t n)
    : field_(width), k_(k), n_(n) {
    if (k == 0 || k > n) {
        throw LengthError("need 0 < k <= n, got k=" + std::to_string(k) +
                          ", n=" + std::to_string(n));
    }
    if (n > field_.order()) {
        throw WidthError("GF(2^" + std::to_string(width) + ") has only " +
                         std::to_string(field_.order()) + " evaluation points, need " +
                         std::to_string(n));
    }

    // Barycentric weights over the systematic points x_i = i:
    //   winv_i = 1 / prod_{t != i} (x_i - x_t)
    // then l_i(x) = M(x) * winv_i / (x - x_i) with M(x) = prod_t (x - x_t).
    std::vector<Fe> winv(k_);
    for (std::uint32_t i = 0; i < k_; ++i) {
        Fe prod = 1;
        for (std::uint32_t t = 0; t < k_; ++t) {
            if (t != i) {
                prod = field_.mul(prod, Field::sub(static_cast<Fe>(i), static_cast<Fe>(t)));
            }
        }
        winv[i] = field_.inv(prod);
    }

    parity_rows_.resize(n_ - k_);
    for (std::uint32_t j = 0; j < n_ - k_; ++j) {
        const Fe x = static_cast<Fe>(k_ + j);
        Fe m_at_x = 1;
        for (std::uint32_t t = 0; t < k_; ++t) {
            m_at_x = field_.mul(m_at_x, Field::sub(x, static_cast<Fe>(t)));
        }
        auto& row = parity_rows_[j];
        row.resize(k_);
        for (std::uint32_t i = 0; i < k_; ++i) {
            const Fe denom = Field::sub(x, static_cast<Fe>(i));  // nonzero: x >= k > i
            row[i] = field_.mul(m_at_x, field_.mul(winv[i], field_.inv(denom)));
        }
    }
}

void SystematicCode::check_data(std::span<const Fe> data) const {
    if (data.size() != k_) {
        throw LengthError("expected " + std::to_string(k_) + " data symbols, got " +
                          std::to_string(data.size()));
    }
    for (Fe v : data) {
        if (v >= field_.order()) {
            throw WidthError("symbol " + std::to_string(v) + " outside GF(2^" +
                             std::to_string(field_.width()) + ")");
        }
    }
}

std::vector<Fe> SystematicCode::parity(std::span<const Fe> data) const {
    check_data(data);
    std::vector<Fe> out(n_ - k_, 0);
    for (std::uint32_t j = 0; j < n_ - k_; ++j) {
        Fe acc = 0;
        const auto& row = parity_rows_[j];
        for (std::uint32_t i = 0; i < k_; ++i) {
            acc = Field::add(acc, field_.mul(row[i], data[i]));
        }
        out[j] = acc;
    }
    return out;
}

std::vector<Fe> SystematicCode::encode(std::span<const Fe> data) const {
    std::vector<Fe> par = parity(data);
    std::vector<Fe> out(data.begin(), data.end());
    out.insert(out.end(), par.begin(), par.end());
    return out;
}

std::vector<Fe> SystematicCode::reconstruct(
    std::span<const std::pair<std::uint32_t, Fe>> known) const {
    if (known.size() != k_) {
        throw PositionError("need exactly " + std::to_string(k_) + " known positions, got " +
                            std::to_string(known.size()));
    }
    std::vector<bool> seen(n_, false);
    for (const auto& [pos, val] : known) {
        if (pos >= n_) {
            throw PositionError("position " + std::to_string(pos) + " outside codeword");
        }
        if (seen[pos]) {
            throw PositionError("duplicate position " + std::to_string(pos));
        }
        if (val >= field_.order()) {
            throw WidthError("symbol outside the field");
        }
        seen[pos] = true;
    }

    // Interpolate f through the k known points, then read the systematic
    // part off as f(0..k-1).
    std::vector<Fe> xs(k_), vals(k_), winv(k_);
    for (std::uint32_t i = 0; i < k_; ++i) {
        xs[i] = static_cast<Fe>(known[i].first);
        vals[i] = known[i].second;
    }
    for (std::uint32_t i = 0; i < k_; ++i) {
        Fe prod = 1;
        for (std::uint32_t t = 0; t < k_; ++t) {
            if (t != i) {
                prod = field_.mul(prod, Field::sub(xs[i], xs[t]));
            }
        }
        if (prod == 0) {
            throw SingularError("interpolation points collapsed");  // unreachable
        }
        winv[i] = field_.inv(prod);
    }

    std::vector<Fe> data(k_, 0);
    for (std::uint32_t target = 0; target < k_; ++target) {
        const Fe x = static_cast<Fe>(target);
        // A target that is itself a known position keeps its value verbatim.
        bool direct = false;
        for (std::uint32_t i = 0; i < k_; ++i) {
            if (xs[i] == x) {
                data[target] = vals[i];
                direct = true;
                break;
            }
        }
        if (direct) {
            continue;
        }
        Fe m_at_x = 1;
        for (std::uint32_t i = 0; i < k_; ++i) {
            m_at_x = field_.mul(m_at_x, Field::sub(x, xs[i]));
        }
        Fe acc = 0;
        for (std::uint32_t i = 0; i < k_; ++i) {
            const Fe li = field_.mul(m_at_x, field_.mul(winv[i], field_.inv(Field::sub(x, xs[i]))));
            acc = Field::add(acc, field_.mul(li, vals[i]));
        }
        data[target] = acc;
    }
    return data;
}

}  // namespace pkpir
