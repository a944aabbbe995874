#pragma once

#include <cstdint>
#include <vector>

#include "cachecast/errors.hpp"

namespace cachecast {

using FieldSymbol = std::uint16_t;

// GF(2^q) arithmetic over log/antilog tables, q in {8, 16}.  Addition is
// XOR; multiplication and inversion go through the discrete log of the
// primitive element x.
class GaloisField {
public:
    explicit GaloisField(int q);

    int bits() const { return q_; }
    std::uint32_t size() const { return size_; }        // 2^q
    std::uint32_t max_value() const { return size_ - 1; }

    FieldSymbol add(FieldSymbol a, FieldSymbol b) const { return a ^ b; }
    FieldSymbol sub(FieldSymbol a, FieldSymbol b) const { return a ^ b; }

    FieldSymbol mul(FieldSymbol a, FieldSymbol b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    FieldSymbol inv(FieldSymbol a) const {
        if (a == 0) throw InvalidInputError("GF inverse of zero");
        return exp_[max_value() - log_[a]];
    }

    FieldSymbol div(FieldSymbol a, FieldSymbol b) const {
        if (b == 0) throw InvalidInputError("GF division by zero");
        if (a == 0) return 0;
        std::uint32_t d = log_[a] + max_value() - log_[b];
        return exp_[d];
    }

    FieldSymbol pow(FieldSymbol a, std::uint64_t e) const;

    // Shared immutable instances.
    static const GaloisField& gf8();
    static const GaloisField& gf16();
    static const GaloisField& by_bits(int q);

private:
    int q_;
    std::uint32_t size_;
    std::uint32_t poly_;
    std::vector<FieldSymbol> exp_;   // 2 * (size - 1) entries, wrap-free lookup
    std::vector<std::uint32_t> log_;
};

}  // namespace cachecast
