#include "phonolab/dispersion.hpp"

#include <cmath>

namespace phonolab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

DispersionModel DispersionModel::flat(double omega0) {
    if (omega0 <= 0) throw ModelError("dispersion: omega0 must be > 0");
    DispersionModel m;
    m.form_ = Form::Flat;
    m.omega0_ = omega0;
    m.name_ = "flat";
    return m;
}

DispersionModel DispersionModel::sqrt_stencil(CouplingStencil stencil, double omega0,
                                              std::string name) {
    if (omega0 <= 0) throw ModelError("dispersion: omega0 must be > 0");
    DispersionModel m;
    m.form_ = Form::SqrtStencil;
    m.omega0_ = omega0;
    m.stencil_ = std::move(stencil);
    m.name_ = std::move(name);
    return m;
}

DispersionModel DispersionModel::cosine(double omega0) {
    if (omega0 <= 0) throw ModelError("dispersion: omega0 must be > 0");
    DispersionModel m;
    m.form_ = Form::Cosine;
    m.omega0_ = omega0;
    m.name_ = "cosine";
    return m;
}

DispersionModel DispersionModel::by_name(const std::string& name, double omega0) {
    if (name == "nn")
        return sqrt_stencil(CouplingStencil::nearest_neighbor(), omega0, "nn");
    if (name == "nn-nnn-311")
        return sqrt_stencil(CouplingStencil::nn_nnn_for_cosine(omega0), omega0, "nn-nnn-311");
    if (name == "cosine") return cosine(omega0);
    if (name == "flat") return flat(omega0);
    throw ConfigError("unknown dispersion model: " + name);
}

double DispersionModel::omega(const Vec3& k) const {
    switch (form_) {
        case Form::Flat:
            return omega0_;
        case Form::Cosine: {
            double s = 0.0;
            for (int a = 0; a < 3; ++a) s += 1.0 - std::cos(kTwoPi * k[a]);
            return omega0_ + s;
        }
        case Form::SqrtStencil: {
            double ah = stencil_->fourier(k);
            double w2 = omega0_ * omega0_ + ah;
            if (w2 <= 1e-12) throw ModelError("dispersion: omega^2 <= 0 (stability violated)");
            return std::sqrt(w2);
        }
    }
    return omega0_;
}

std::array<double, 3> DispersionModel::grad_omega(const Vec3& k) const {
    switch (form_) {
        case Form::Flat:
            return {0.0, 0.0, 0.0};
        case Form::Cosine: {
            std::array<double, 3> g;
            for (int a = 0; a < 3; ++a) g[a] = kTwoPi * std::sin(kTwoPi * k[a]);
            return g;
        }
        case Form::SqrtStencil: {
            std::array<double, 3> g = stencil_->fourier_gradient(k);
            double w = omega(k);
            for (int a = 0; a < 3; ++a) g[a] /= 2.0 * w;
            return g;
        }
    }
    return {0.0, 0.0, 0.0};
}

const CouplingStencil& DispersionModel::stencil() const {
    if (!stencil_) throw ModelError("dispersion: no stencil for this form");
    return *stencil_;
}

double DispersionModel::omega_max(const Grid3& g) const {
    double m = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i) m = std::max(m, omega(g, i));
    return m;
}

double DispersionModel::max_group_speed() const {
    switch (form_) {
        case Form::Flat:
            return 0.0;
        case Form::Cosine:
            // |grad omega| = 2 pi |(sin, sin, sin)| <= 2 pi sqrt(3).
            return std::sqrt(3.0);
        case Form::SqrtStencil: {
            const int P = 48;
            double m = 0.0;
            for (int z = 0; z < P; ++z)
                for (int y = 0; y < P; ++y)
                    for (int x = 0; x < P; ++x) {
                        Vec3 k = {x / double(P), y / double(P), z / double(P)};
                        auto gr = grad_omega(k);
                        double v = std::sqrt(gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2]);
                        m = std::max(m, v);
                    }
            return m / kTwoPi;
        }
    }
    return 0.0;
}

std::vector<double> DispersionModel::omega_table(const Grid3& g) const {
    std::vector<double> t(static_cast<std::size_t>(g.size()));
    for (std::int64_t i = 0; i < g.size(); ++i) t[static_cast<std::size_t>(i)] = omega(g, i);
    return t;
}

}  // namespace phonolab
