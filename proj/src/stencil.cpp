#include "phonolab/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace phonolab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

IVec3 neg(const IVec3& v) { return {-v[0], -v[1], -v[2]}; }
}  // namespace

CouplingStencil::CouplingStencil(std::vector<IVec3> offsets, std::vector<double> values,
                                 double alpha0, double gamma)
    : offsets_(std::move(offsets)), values_(std::move(values)), alpha0_(alpha0), gamma_(gamma) {
    if (offsets_.size() != values_.size())
        throw ModelError("stencil: offsets/values size mismatch");

    std::map<IVec3, double> table;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        if (table.count(offsets_[i])) throw ModelError("stencil: duplicate offset");
        table[offsets_[i]] = values_[i];
    }
    for (const auto& [off, val] : table) {
        auto it = table.find(neg(off));
        if (it == table.end() || it->second != val)
            throw ModelError("stencil: alpha(x) != alpha(-x)");
    }

    // Translation invariance demands sum alpha(x) = 0 exactly, not to
    // tolerance; built-in values are dyadic so the sum is exact in binary.
    if (value_sum() != 0.0) throw ModelError("stencil: sum alpha(x) != 0");

    // Mechanical stability: alphahat(k) > 0 for k != 0 on a probe grid.
    const int P = 24;
    for (int z = 0; z < P; ++z)
        for (int y = 0; y < P; ++y)
            for (int x = 0; x < P; ++x) {
                if (x == 0 && y == 0 && z == 0) continue;
                Vec3 k = {x / double(P), y / double(P), z / double(P)};
                if (fourier(k) <= -1e-12)
                    throw ModelError("stencil: alphahat(k) <= 0 at nonzero k (unstable)");
            }
}

double CouplingStencil::fourier(const Vec3& k) const {
    double s = 0.0;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        const IVec3& o = offsets_[i];
        s += values_[i] * std::cos(kTwoPi * (k[0] * o[0] + k[1] * o[1] + k[2] * o[2]));
    }
    return s;
}

std::array<double, 3> CouplingStencil::fourier_gradient(const Vec3& k) const {
    std::array<double, 3> g = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        const IVec3& o = offsets_[i];
        double s = std::sin(kTwoPi * (k[0] * o[0] + k[1] * o[1] + k[2] * o[2]));
        for (int a = 0; a < 3; ++a) g[a] -= kTwoPi * values_[i] * o[a] * s;
    }
    return g;
}

double CouplingStencil::value_sum() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

int CouplingStencil::max_extent() const {
    int m = 0;
    for (const auto& o : offsets_)
        for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(o[a]));
    return m;
}

CouplingStencil CouplingStencil::fold_to_box(int L, bool* folded) const {
    std::map<IVec3, double> table;
    bool any = false;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        IVec3 w;
        for (int a = 0; a < 3; ++a) {
            int c = ((offsets_[i][a] % L) + L) % L;
            // keep the signed representative in (-L/2, L/2]
            w[a] = c > L / 2 ? c - L : c;
        }
        if (w != offsets_[i]) any = true;
        auto [it, inserted] = table.emplace(w, values_[i]);
        if (!inserted) {
            it->second += values_[i];
            any = true;
        }
    }
    if (folded) *folded = any;
    std::vector<IVec3> offs;
    std::vector<double> vals;
    for (const auto& [o, v] : table) {
        offs.push_back(o);
        vals.push_back(v);
    }
    // Aliased offsets merge into single entries that are symmetric only
    // modulo L, so the literal invariants no longer apply; the folded object
    // inherits zero sum and grid stability from the validated parent.
    return CouplingStencil(Unchecked{}, std::move(offs), std::move(vals), alpha0_, gamma_);
}

CouplingStencil CouplingStencil::nearest_neighbor() {
    std::vector<IVec3> offs = {{0, 0, 0}};
    std::vector<double> vals = {6.0};
    for (int a = 0; a < 3; ++a)
        for (int s : {-1, 1}) {
            IVec3 o = {0, 0, 0};
            o[a] = s;
            offs.push_back(o);
            vals.push_back(-1.0);
        }
    return CouplingStencil(std::move(offs), std::move(vals), 6.0, 1.0);
}

CouplingStencil CouplingStencil::nn_nnn_for_cosine(double omega0) {
    // Expand (omega0 + s)^2 - omega0^2 with s = 3 - sum_a cos(2 pi k^a):
    //   alpha(0)       = 6 omega0 + 21/2
    //   alpha(+-e_a)   = -(omega0 + 3)
    //   alpha(e_a+-e_b)= 1/2   (12 offsets, two nonzero components)
    //   alpha(+-2 e_a) = 1/4
    std::vector<IVec3> offs;
    std::vector<double> vals;
    offs.push_back({0, 0, 0});
    vals.push_back(6.0 * omega0 + 10.5);
    for (int a = 0; a < 3; ++a)
        for (int s : {-1, 1}) {
            IVec3 o = {0, 0, 0};
            o[a] = s;
            offs.push_back(o);
            vals.push_back(-(omega0 + 3.0));
            o[a] = 2 * s;
            offs.push_back(o);
            vals.push_back(0.25);
        }
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            for (int sa : {-1, 1})
                for (int sb : {-1, 1}) {
                    IVec3 o = {0, 0, 0};
                    o[a] = sa;
                    o[b] = sb;
                    offs.push_back(o);
                    vals.push_back(0.5);
                }
    return CouplingStencil(std::move(offs), std::move(vals), 6.0 * omega0 + 10.5, 0.5);
}

}  // namespace phonolab
