// End-to-end experiments: microscopic ensemble -> evolution to t/eps at
// coupling sqrt(eps)*lambda -> Wigner estimate, against the kinetic solution
// at time t; and the order-1 diagram sum against the first series term over
// an eps sequence. Reports are directories of manifest + CSV + summary whose
// bytes depend only on the plan.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phonolab/collision.hpp"
#include "phonolab/config.hpp"
#include "phonolab/dispersion.hpp"
#include "phonolab/grid.hpp"

namespace phonolab {

struct KineticComparisonPlan {
    std::string model_name = "nn-nnn-311";
    double omega0 = 1.0;
    std::string w0_expr = "1 + 0.5*cos(k1)";
    std::vector<double> eps_list = {0.2, 0.1, 0.05};
    int L = 16;
    int samples = 64;
    double t = 0.2;      // kinetic time
    double lambda = 1.0;
    double h = 0.0;      // 0 -> 0.05 / omega_max
    double eta = 0.0;    // 0 -> resolution minimum
    double dt = 0.0;     // 0 -> t / 8
    std::uint64_t seed = 1;

    KeyValueConfig to_config() const;
    static KineticComparisonPlan from_config(const KeyValueConfig& cfg);

    // Sound-cone guard: (t/eps_min) * max group speed < L/2.
    void validate(const DispersionModel& model) const;
};

struct EpsCell {
    double eps = 0.0;
    double D = 0.0;        // debiased L2-over-k discrepancy vs the kinetic solution
    double D_sigma = 0.0;  // jackknife error
    double raw_D2 = 0.0;
    double noise_bias = 0.0;
    double max_energy_drift = 0.0;  // microscopic |H(T)-H(0)|/H(0), worst sample
};

struct KineticComparisonReport {
    KineticComparisonPlan plan;
    double eta_used = 0.0;
    double h_used = 0.0;
    std::vector<EpsCell> cells;       // ordered as plan.eps_list
    bool monotone_within_sigma = false;
};

KineticComparisonReport run_kinetic_comparison(const KineticComparisonPlan& plan,
                                               const std::string& outdir);

// Re-run a report directory from its manifest (bit-identical outputs).
KineticComparisonReport rerun_kinetic_comparison(const std::string& manifest_path,
                                                 const std::string& outdir);

struct DiagramSeriesPlan {
    std::string model_name = "nn-nnn-311";
    double omega0 = 1.0;
    std::string w0_expr = "1 + 0.5*cos(k1)";
    std::vector<double> eps_list = {0.2, 0.1, 0.05};
    int L = 12;
    double t = 0.5;     // kinetic time
    double lambda = 1.0;
    double eta = 0.0;   // 0 -> resolution minimum
    bool attach_n2_census = true;

    KeyValueConfig to_config() const;
    static DiagramSeriesPlan from_config(const KeyValueConfig& cfg);
};

struct DiagramSeriesReport {
    DiagramSeriesPlan plan;
    double eta_used = 0.0;
    std::vector<double> sup_gaps;     // per eps: sup_k |W1^eps - t CW|
    bool monotone = false;
    double max_imag = 0.0;
    std::string figure_class;         // classification of the reference figure diagram
    long long n2_diagrams = 0;
    long long n2_leading = 0;
};

DiagramSeriesReport run_diagram_vs_series(const DiagramSeriesPlan& plan,
                                          const std::string& outdir);

// Microscopic dynamics needs a coupling stencil; cosine-form models map to
// the exact nn+nnn stencil with the same dispersion.
CouplingStencil stencil_for_model(const DispersionModel& model);

}  // namespace phonolab
