#include "cachecast/galois.hpp"

namespace cachecast {

namespace {

// Primitive polynomials: x^8+x^4+x^3+x^2+1 and x^16+x^12+x^3+x+1.
constexpr std::uint32_t kPoly8 = 0x11D;
constexpr std::uint32_t kPoly16 = 0x1100B;

}  // namespace

GaloisField::GaloisField(int q) : q_(q) {
    if (q == 8) {
        poly_ = kPoly8;
    } else if (q == 16) {
        poly_ = kPoly16;
    } else {
        throw ConfigError("GaloisField: q must be 8 or 16");
    }
    size_ = std::uint32_t{1} << q;
    const std::uint32_t order = size_ - 1;
    exp_.resize(2 * order);
    log_.assign(size_, 0);
    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i < order; ++i) {
        exp_[i] = static_cast<FieldSymbol>(x);
        exp_[i + order] = static_cast<FieldSymbol>(x);
        log_[x] = i;
        x <<= 1;
        if (x & size_) x ^= poly_;
    }
}

FieldSymbol GaloisField::pow(FieldSymbol a, std::uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    const std::uint64_t order = max_value();
    std::uint64_t le = (static_cast<std::uint64_t>(log_[a]) * (e % order)) % order;
    return exp_[le];
}

const GaloisField& GaloisField::gf8() {
    static const GaloisField f(8);
    return f;
}

const GaloisField& GaloisField::gf16() {
    static const GaloisField f(16);
    return f;
}

const GaloisField& GaloisField::by_bits(int q) {
    if (q == 8) return gf8();
    if (q == 16) return gf16();
    throw ConfigError("GaloisField: q must be 8 or 16");
}

}  // namespace cachecast
