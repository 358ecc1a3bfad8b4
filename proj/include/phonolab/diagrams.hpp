// Feynman diagrams of the time-dependent perturbation series: two binary
// trees drawn on 2n+2 level lines, one branch point per internal line,
// oriented bonds (left root down, right root up), level-0 pairing matching
// up arrows to down arrows only. Momentum labels solve Kirchhoff's rule at
// every branch exactly over the integers; the classifier applies the kinetic
// conjecture's two conditions (no forced zero momentum, per-double-slab
// phase cancellation for every choice of internal wave numbers).
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "phonolab/dispersion.hpp"
#include "phonolab/fft.hpp"
#include "phonolab/grid.hpp"

namespace phonolab {

struct Bond {
    int top = 0;     // upper level line
    int bottom = 0;  // lower level line (0 if it reaches the pairing row)
    int sigma = 0;   // +1 up, -1 down
    int parent = -1;
    std::array<int, 2> children = {-1, -1};
    int pair = -1;   // level-0 partner bond, -1 if none
    bool is_root = false;
};

struct FeynmanDiagram {
    int order = 0;                // n
    std::vector<Bond> bonds;      // 0 = left root (q, down), 1 = right root (p, up)
    std::vector<int> schedule;    // open-list index branching at level 2n, 2n-1, ..., 1
    std::vector<int> level0;      // bond ids on level 0 in drawing order

    std::string key() const;     // canonical census key
    void validate() const;       // structural invariants
};

// Exhaustive duplicate-free enumeration (branch schedules x orientations x
// admissible pairings). Materializes; guarded to order <= 2. The visitor
// form streams diagrams and carries order 3 for counting.
std::vector<FeynmanDiagram> enumerate_diagrams(int order);
void visit_diagrams(int order, const std::function<void(const FeynmanDiagram&)>& fn);

// Momentum assignment: every bond momentum as an integer-affine expression
// over the free basis (f_1..f_m, q) after extracting the global delta(q-p).
struct AffineExpr {
    std::vector<long long> coef;  // size n_free + 1; last entry multiplies q

    bool is_zero() const {
        for (long long c : coef)
            if (c != 0) return false;
        return true;
    }
};

struct MomentumAssignment {
    int n_free = 0;                         // internal free momenta
    std::vector<AffineExpr> bond_momentum;  // per bond id
    std::vector<int> free_bonds;            // bond carrying f_i (level-0 preferred)
    bool degenerate = false;                // some bond forced identically zero
    bool external_pinned = false;           // disconnected pairing: forces q = p = 0
    bool has_global_delta = false;          // delta(q-p) extracted
};

MomentumAssignment assign_momenta(const FeynmanDiagram& d);

struct Classification {
    enum class Kind { Leading, SubleadingSlab, SubleadingForcedZero, SubleadingPinned };
    Kind kind = Kind::Leading;
    int failing_slab = -1;  // m: phases between lines 2m and 2m+1 do not cancel

    bool leading() const { return kind == Kind::Leading; }
    std::string label() const;
};

Classification classify(const FeynmanDiagram& d, const MomentumAssignment& ma);

struct DiagramRecord {
    FeynmanDiagram diagram;
    MomentumAssignment momenta;
    Classification cls;
};

std::vector<DiagramRecord> diagram_census(int order);
void write_census(std::ostream& os, const std::vector<DiagramRecord>& recs);

// Counting cross-checks for the naive series bound
//   eps^n (t/eps)^{2n} ((2n)!)^{-1} (2n)! c^{2n} (2n+2)!/(2^{n+1}(n+1)!).
struct BoundReport {
    int n = 0;
    double t = 0, eps = 0, c = 0;
    double time_factor = 0;     // (t/eps)^{2n} / (2n)!
    double ell_factor = 0;      // (2n)!
    double k_factor = 0;        // c^{2n}
    double pairing_factor = 0;  // (2n+2)! / (2^{n+1} (n+1)!)
    double bound = 0;
    long long census_schedules = 0;  // enumerated: prod_{j=2}^{2n+1} j
    long long census_pairings = 0;   // perfect matchings of 2n+2 leaves
    long long census_diagrams = 0;   // admissible oriented paired diagrams
};

BoundReport naive_bound_report(int n, double t, double eps, double c);

// The order-2 diagram drawn in the reference figure: left root branching at
// level 4, its right branch at level 3, the right root at level 2, the
// leftover left branch at level 1, pairing (7,6), (8,3), (4,5).
FeynmanDiagram figure_diagram();

// --- evaluation --------------------------------------------------------------

struct DiagramEvalParams {
    double eps = 1.0;
    double t = 0.0;              // kinetic time
    double lambda = 1.0;         // vertex coupling
    RField W;                    // initial covariance on the L-grid
    DispersionModel model = DispersionModel::flat(1.0);
    int L = 0;
    bool include_degenerate = false;  // keep forced-zero/pinned contributions
};

// Integral of one diagram as a function of the external q (table over the
// grid): free-momentum sums with weight L^-3 each, closed-form simplex time
// integral per momentum configuration, prefactor (-1)^n eps^-n.
CField evaluate_diagram(const FeynmanDiagram& d, const MomentumAssignment& ma,
                        const DiagramEvalParams& p);

struct CorrectionResult {
    RField values;          // W_n^eps(q, t)
    double max_imag = 0.0;  // conjugation-closure residue
    int diagrams = 0;
    int excluded = 0;       // degenerate/pinned diagrams dropped (unless included)
};

CorrectionResult wigner_correction(int order, const DiagramEvalParams& p);

// Divided difference of z -> exp(t z) over the given nodes; equals the
// ordered-simplex integral of the product of per-slab phase factors.
// Stable for clustered and coincident nodes (series on clusters).
std::complex<double> exp_divided_difference(const std::complex<double>* nodes, int count,
                                            double t);

}  // namespace phonolab
