// Dispersion relations omega(k) on the unit torus, omega >= omega0 > 0.
//
// Two first-class forms: sqrt-form omega = sqrt(omega0^2 + alphahat(k))
// driven by a coupling stencil, and the closed cosine form
// omega = omega0 + sum_a (1 - cos(2 pi k^a)). A flat omega == omega0
// (zero stencil) is kept for degenerate checks.
#pragma once

#include <memory>
#include <optional>
#include <string>

#include "phonolab/grid.hpp"
#include "phonolab/stencil.hpp"

namespace phonolab {

class DispersionModel {
public:
    enum class Form { Flat, SqrtStencil, Cosine };

    static DispersionModel flat(double omega0);
    static DispersionModel sqrt_stencil(CouplingStencil stencil, double omega0,
                                        std::string name = "stencil");
    static DispersionModel cosine(double omega0);

    // Built-ins by config name: "nn", "nn-nnn-311", "cosine", "flat".
    static DispersionModel by_name(const std::string& name, double omega0);

    double omega(const Vec3& k) const;
    std::array<double, 3> grad_omega(const Vec3& k) const;

    double omega(const Grid3& g, std::int64_t idx) const { return omega(g.kvec(idx)); }

    double omega0() const { return omega0_; }
    Form form() const { return form_; }
    const std::string& name() const { return name_; }

    bool has_stencil() const { return stencil_.has_value(); }
    const CouplingStencil& stencil() const;

    // Exact maximum over the given grid's modes (the stability-relevant one).
    double omega_max(const Grid3& g) const;

    // max_k |grad omega| / (2 pi): the fastest transport speed entering the
    // free-streaming term and the sound-cone guard. Closed form for flat and
    // cosine, deterministic dense scan for stencil models.
    double max_group_speed() const;

    std::vector<double> omega_table(const Grid3& g) const;

private:
    Form form_ = Form::Flat;
    double omega0_ = 1.0;
    std::optional<CouplingStencil> stencil_;
    std::string name_;
};

}  // namespace phonolab
