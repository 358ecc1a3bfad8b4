// Three-phonon collision operator on the k-grid.
//
// (C W)(k) = 4 pi sum_{(s1,s2)} N^-3 sum_{k1} phi(k,k1,k2)^2
//            delta_eta(omega + s1 omega1 + s2 omega2) * bracket,
// with k2 = -s2 (k + s1 k1) mod 1 solving the momentum delta exactly on the
// grid (Kronecker, never mollified), phi = lambda (8 w w1 w2)^{-1/2}, and
// bracket either the reduced two-term form (W1 W2 + 2 s2 W W1) or the
// symmetrized three-term form (W1 W2 + s1 W W2 + s2 W W1). The (+,+)
// channel has argument >= 3 omega0 and is excluded. The energy delta is a
// mollifier of width eta, extrapolated eta -> 0 by the callers that need it.
#pragma once

#include <string>
#include <vector>

#include "phonolab/dispersion.hpp"
#include "phonolab/grid.hpp"

namespace phonolab {

struct Mollifier {
    enum class Kind { Gaussian, Lorentzian };
    Kind kind = Kind::Gaussian;
    double eta = 0.1;

    double operator()(double x) const;
    static Mollifier gaussian(double eta) { return {Kind::Gaussian, eta}; }
    static Mollifier lorentzian(double eta) { return {Kind::Lorentzian, eta}; }
};

struct Channel {
    int s1 = 1, s2 = -1;
};

enum class CollisionForm { TwoTerm, ThreeTerm };

struct CollisionConfig {
    DispersionModel model = DispersionModel::flat(1.0);
    double lambda = 1.0;
    int N = 8;  // k-grid side
    Mollifier moll = Mollifier::gaussian(0.2);
    std::vector<Channel> channels = {{+1, -1}, {-1, +1}, {-1, -1}};
    CollisionForm form = CollisionForm::TwoTerm;
    bool enforce_resolution = true;

    void validate() const;  // rejects the (+,+) channel
};

// Kernel bound to a config: omega tables and fold maps precomputed.
class CollisionKernel {
public:
    explicit CollisionKernel(CollisionConfig cfg);

    const CollisionConfig& config() const { return cfg_; }
    const Grid3& grid() const { return grid_; }
    const std::vector<double>& omega() const { return omega_; }

    // Smallest admissible mollifier width on this grid:
    // eta_min = 2 * max group speed * (1/N).
    double eta_min() const { return eta_min_; }

    std::vector<double> apply(const std::vector<double>& W) const;

    // Energy functional L^-3 sum omega W (conserved by C up to O(eta)).
    double energy_functional(const std::vector<double>& W) const;

private:
    void check_resolution() const;

    CollisionConfig cfg_;
    Grid3 grid_;
    std::vector<double> omega_, inv_omega_;
    double eta_min_ = 0.0;
};

// Mollified estimate of int int delta(omega(k)+omega(k')-omega(k+k')) dk dk'
// over an eta-refinement sequence, with an eta->0 extrapolation.
struct MeasureReport {
    std::vector<double> etas;
    std::vector<double> values;
    double extrapolated = 0.0;
    double error_bar = 0.0;
};
MeasureReport collision_measure(const CollisionConfig& cfg, const std::vector<double>& etas);

// sup_k of the inner integral int delta(omega(k)+omega(k')-omega(k+k')) dk'
// per eta level; finiteness of the limit is the c0 condition.
struct C0Report {
    std::vector<double> etas;
    std::vector<double> sup_values;
    std::vector<std::int64_t> argmax;
    double relative_variation = 0.0;  // between the last two levels
};
C0Report c0_bound(const CollisionConfig& cfg, const std::vector<double>& etas);

// Certified-by-sampling minimum of |omega(k)+omega(k')-omega(k+k')| via
// nested local refinement around the best candidates.
struct GapReport {
    std::vector<double> per_level_min;
    double min_gap = 0.0;
    Vec3 argmin_k{}, argmin_kp{};
};
GapReport no_collision_check(const DispersionModel& model, int levels, int coarse = 16);

double vertex_phi(const Vec3& k, const Vec3& k1, const Vec3& k2, double lambda,
                  const DispersionModel& model);

}  // namespace phonolab
