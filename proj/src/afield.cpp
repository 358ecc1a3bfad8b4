#include "phonolab/afield.hpp"

#include <cmath>

namespace phonolab {

AField AField::zero(int L) {
    AField f;
    f.L = L;
    f.a.assign(static_cast<std::size_t>(L) * L * L, {0.0, 0.0});
    return f;
}

AField to_afield(const Grid3& g, const CField& qhat, const CField& phat,
                 const DispersionModel& model) {
    AField out;
    out.L = g.side();
    out.a.resize(static_cast<std::size_t>(g.size()));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        double w = model.omega(g, i);
        double sw = std::sqrt(w);
        std::size_t s = static_cast<std::size_t>(i);
        out.a[s] = inv_sqrt2 * (sw * qhat[s] + std::complex<double>(0.0, 1.0) * phat[s] / sw);
    }
    return out;
}

AField to_afield(const FieldState& s, const DispersionModel& model) {
    Grid3 g(s.L);
    return to_afield(g, dft(g, s.q), dft(g, s.p), model);
}

FieldState from_afield(const AField& af, const DispersionModel& model, double t) {
    Grid3 g(af.L);
    CField qhat(af.a.size()), phat(af.a.size());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        double w = model.omega(g, i);
        double sw = std::sqrt(w);
        std::size_t s = static_cast<std::size_t>(i);
        std::complex<double> amk = std::conj(af.a[static_cast<std::size_t>(g.negate(i))]);
        qhat[s] = inv_sqrt2 / sw * (af.a[s] + amk);
        phat[s] = std::complex<double>(0.0, 1.0) * inv_sqrt2 * sw * (-af.a[s] + amk);
    }
    FieldState out;
    out.L = af.L;
    out.t = t;
    out.q = idft_real(g, qhat);
    out.p = idft_real(g, phat);
    return out;
}

void harmonic_propagate(AField& af, double t, const DispersionModel& model) {
    Grid3 g(af.L);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        double w = model.omega(g, i);
        af.a[static_cast<std::size_t>(i)] *= std::polar(1.0, -w * t);
    }
}

Totals conserved_totals(const AField& af, const DispersionModel& model) {
    Grid3 g(af.L);
    Totals tot;
    for (std::int64_t i = 0; i < g.size(); ++i) {
        double n = std::norm(af.a[static_cast<std::size_t>(i)]);
        tot.phonon_number += n;
        tot.energy += model.omega(g, i) * n;
    }
    tot.phonon_number /= static_cast<double>(g.size());
    tot.energy /= static_cast<double>(g.size());
    return tot;
}

}  // namespace phonolab
