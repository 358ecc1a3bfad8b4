// Cubic periodic lattice {0..L-1}^3 and the dual wave-number grid {n/L}^3.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace phonolab {

using Vec3 = std::array<double, 3>;
using IVec3 = std::array<int, 3>;
using RField = std::vector<double>;
using CField = std::vector<std::complex<double>>;

// Sites and wave numbers share the same flat index space. Flattening is
// x-fastest: idx = x + L*(y + L*z), matching the on-disk snapshot layout.
class Grid3 {
public:
    explicit Grid3(int side) : L_(side) {
        if (side < 1) throw std::invalid_argument("Grid3: side must be >= 1");
        n_ = static_cast<std::int64_t>(side) * side * side;
    }

    int side() const { return L_; }
    std::int64_t size() const { return n_; }

    std::int64_t index(int x, int y, int z) const {
        return x + static_cast<std::int64_t>(L_) * (y + static_cast<std::int64_t>(L_) * z);
    }

    IVec3 coords(std::int64_t idx) const {
        int x = static_cast<int>(idx % L_);
        int y = static_cast<int>((idx / L_) % L_);
        int z = static_cast<int>(idx / (static_cast<std::int64_t>(L_) * L_));
        return {x, y, z};
    }

    int wrap(int c) const {
        c %= L_;
        return c < 0 ? c + L_ : c;
    }

    std::int64_t index_wrapped(int x, int y, int z) const {
        return index(wrap(x), wrap(y), wrap(z));
    }

    // k = n/L on the unit torus [0,1)^3.
    Vec3 kvec(std::int64_t idx) const {
        IVec3 c = coords(idx);
        return {c[0] / static_cast<double>(L_), c[1] / static_cast<double>(L_),
                c[2] / static_cast<double>(L_)};
    }

    // Index of -k (componentwise L - n mod L).
    std::int64_t negate(std::int64_t idx) const {
        IVec3 c = coords(idx);
        return index((L_ - c[0]) % L_, (L_ - c[1]) % L_, (L_ - c[2]) % L_);
    }

    std::int64_t add(std::int64_t a, std::int64_t b) const {
        IVec3 ca = coords(a), cb = coords(b);
        return index((ca[0] + cb[0]) % L_, (ca[1] + cb[1]) % L_, (ca[2] + cb[2]) % L_);
    }

    std::int64_t sub(std::int64_t a, std::int64_t b) const {
        IVec3 ca = coords(a), cb = coords(b);
        return index_wrapped(ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2]);
    }

    // Signed representative in (-L/2, L/2].
    int signed_coord(int c) const { return c > L_ / 2 ? c - L_ : c; }

private:
    int L_;
    std::int64_t n_;
};

// Errors shared across modules.
struct BlowUpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace phonolab
