#include "phonolab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phonolab/afield.hpp"
#include "phonolab/boltzmann.hpp"
#include "phonolab/diagrams.hpp"
#include "phonolab/ensemble.hpp"
#include "phonolab/lattice.hpp"
#include "phonolab/report.hpp"

namespace phonolab {

CouplingStencil stencil_for_model(const DispersionModel& model) {
    if (model.has_stencil()) return model.stencil();
    if (model.form() == DispersionModel::Form::Cosine)
        return CouplingStencil::nn_nnn_for_cosine(model.omega0());
    throw ConfigError("microscopic evolution needs a stencil-backed dispersion model");
}

// --- plan <-> config ---------------------------------------------------------

KeyValueConfig KineticComparisonPlan::to_config() const {
    KeyValueConfig cfg;
    cfg.set("kind", "kinetic-compare");
    cfg.set("model.name", model_name);
    cfg.set_double("model.omega0", omega0);
    cfg.set("w0", w0_expr);
    cfg.set_list("eps", eps_list);
    cfg.set_int("grid.L", L);
    cfg.set_int("samples", samples);
    cfg.set_double("t", t);
    cfg.set_double("lambda", lambda);
    cfg.set_double("h", h);
    cfg.set_double("eta", eta);
    cfg.set_double("dt", dt);
    cfg.set_int("seed", static_cast<long long>(seed));
    return cfg;
}

KineticComparisonPlan KineticComparisonPlan::from_config(const KeyValueConfig& cfg) {
    cfg.require_known({"kind", "model.name", "model.omega0", "model.offsets", "model.values",
                       "w0", "eps", "grid.L", "samples", "t", "lambda", "h", "eta", "dt",
                       "seed"});
    KineticComparisonPlan p;
    p.model_name = cfg.get_string("model.name");
    p.omega0 = cfg.get_double("model.omega0", 1.0);
    p.w0_expr = cfg.get_string("w0");
    p.eps_list = cfg.get_list("eps");
    p.L = static_cast<int>(cfg.get_int("grid.L"));
    p.samples = static_cast<int>(cfg.get_int("samples"));
    p.t = cfg.get_double("t");
    p.lambda = cfg.get_double("lambda");
    p.h = cfg.get_double("h", 0.0);
    p.eta = cfg.get_double("eta", 0.0);
    p.dt = cfg.get_double("dt", 0.0);
    p.seed = cfg.get_u64("seed", 1);
    return p;
}

void KineticComparisonPlan::validate(const DispersionModel& model) const {
    if (eps_list.empty()) throw ConfigError("plan: eps list is empty");
    for (double e : eps_list)
        if (!(e > 0.0) || e > 1.0) throw ConfigError("plan: eps must be in (0,1]");
    if (samples < 2) throw ConfigError("plan: need at least 2 samples");
    double eps_min = *std::min_element(eps_list.begin(), eps_list.end());
    double horizon = t / eps_min * model.max_group_speed();
    if (!(horizon < L / 2.0)) {
        std::ostringstream os;
        os << "plan: sound-cone guard violated: (t/eps)*max|grad omega|/2pi = " << horizon
           << " >= L/2 = " << L / 2.0;
        throw ConfigError(os.str());
    }
}

// --- kinetic comparison ------------------------------------------------------

namespace {

struct Stats {
    double D = 0.0, sigma = 0.0, raw_D2 = 0.0, bias = 0.0;
};

// Debiased L2 discrepancy between the sample-mean Wigner table and a
// reference table. The naive L2 gap carries the estimator variance as a
// positive bias; subtracting the jackknife variance estimate makes the
// lambda=0 control scatter around zero.
Stats discrepancy(const std::vector<RField>& per_sample, const RField& ref) {
    const int S = static_cast<int>(per_sample.size());
    const std::size_t n = ref.size();
    RField mean(n, 0.0), var(n, 0.0);
    for (const RField& w : per_sample)
        for (std::size_t i = 0; i < n; ++i) mean[i] += w[i];
    for (std::size_t i = 0; i < n; ++i) mean[i] /= S;
    for (const RField& w : per_sample)
        for (std::size_t i = 0; i < n; ++i) {
            double d = w[i] - mean[i];
            var[i] += d * d;
        }
    // variance of the mean
    for (std::size_t i = 0; i < n; ++i) var[i] /= static_cast<double>(S) * (S - 1);

    auto d2_of = [&](const RField& m) {
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = m[i] - ref[i];
            a += d * d;
        }
        return a / static_cast<double>(n);
    };

    Stats st;
    st.raw_D2 = d2_of(mean);
    for (std::size_t i = 0; i < n; ++i) st.bias += var[i];
    st.bias /= static_cast<double>(n);
    double d2 = st.raw_D2 - st.bias;
    st.D = d2 > 0.0 ? std::sqrt(d2) : 0.0;

    // jackknife over samples on the debiased statistic
    std::vector<double> jack(static_cast<std::size_t>(S));
    RField loo(n);
    for (int s = 0; s < S; ++s) {
        for (std::size_t i = 0; i < n; ++i)
            loo[i] = (mean[i] * S - per_sample[static_cast<std::size_t>(s)][i]) / (S - 1);
        // leave-one-out variance-of-mean scales by (S-1)/(S-2) samples; keep
        // the same bias estimate (second-order effect)
        double d2i = d2_of(loo) - st.bias;
        jack[static_cast<std::size_t>(s)] = d2i > 0.0 ? std::sqrt(d2i) : 0.0;
    }
    double jm = 0.0;
    for (double v : jack) jm += v;
    jm /= S;
    double jv = 0.0;
    for (double v : jack) jv += (v - jm) * (v - jm);
    st.sigma = std::sqrt(jv * (S - 1) / static_cast<double>(S));
    return st;
}

}  // namespace

KineticComparisonReport run_kinetic_comparison(const KineticComparisonPlan& plan,
                                               const std::string& outdir) {
    DispersionModel model = DispersionModel::by_name(plan.model_name, plan.omega0);
    plan.validate(model);
    Grid3 grid(plan.L);
    CouplingStencil stencil = stencil_for_model(model);

    KineticComparisonReport rep;
    rep.plan = plan;

    RField W0 = parse_w_expression(plan.w0_expr, grid, model);
    for (double w : W0)
        if (!(w >= 0.0)) throw ConfigError("plan: W0 expression must be >= 0 on the grid");

    const double omega_max = model.omega_max(grid);
    rep.h_used = plan.h > 0.0 ? plan.h : 0.05 / omega_max;

    // kinetic side
    CollisionConfig ccfg;
    ccfg.model = model;
    ccfg.lambda = plan.lambda;
    ccfg.N = plan.L;
    double eta_min = 2.0 * model.max_group_speed() / plan.L;
    rep.eta_used = plan.eta > 0.0 ? plan.eta : eta_min;
    ccfg.moll = Mollifier::gaussian(rep.eta_used);
    CollisionKernel kernel(ccfg);

    RField WB = W0;
    if (plan.lambda != 0.0) {
        double dt = plan.dt > 0.0 ? plan.dt : plan.t / 8.0;
        Trajectory traj = solve_homogeneous(W0, plan.t, dt, kernel);
        WB = traj.snapshots.back();
    }

    GaussianEnsembleSpec spec;
    spec.L = plan.L;
    spec.W = W0;
    spec.seed = plan.seed;

    ensure_directory(outdir);
    KeyValueConfig manifest = plan.to_config();
    const std::uint64_t chash = manifest.hash();
    write_text_file(outdir + "/manifest.txt", manifest.serialize());

    // common header for every csv
    const std::string header = report_header(chash, plan.seed);

    {
        CsvWriter csv({"k1", "k2", "k3", "W_kinetic"});
        for (std::int64_t i = 0; i < grid.size(); ++i) {
            Vec3 k = grid.kvec(i);
            csv.row_numbers({k[0], k[1], k[2], WB[static_cast<std::size_t>(i)]});
        }
        write_text_file(outdir + "/boltzmann_w.csv", header + csv.text());
    }

    for (std::size_t ei = 0; ei < plan.eps_list.size(); ++ei) {
        const double eps = plan.eps_list[ei];
        PotentialSpec pot;
        pot.lambda = plan.lambda;
        pot.epsilon = eps;
        pot.omega0 = plan.omega0;

        std::vector<RField> per_sample;
        per_sample.reserve(static_cast<std::size_t>(plan.samples));
        double worst_drift = 0.0;
        const double T = plan.t / eps;
        const double vol = static_cast<double>(grid.size());

        for (int s = 0; s < plan.samples; ++s) {
            AField a = draw_sample(spec, static_cast<std::uint64_t>(s));
            FieldState st = from_afield(a, model, 0.0);
            double H0 = energy(st, stencil, pot);
            EvolveOptions opts;
            FieldState fin = evolve(std::move(st), T, rep.h_used, stencil, pot, opts);
            double H1 = energy(fin, stencil, pot);
            if (H0 != 0.0)
                worst_drift = std::max(worst_drift, std::abs(H1 - H0) / std::abs(H0));
            AField af = to_afield(fin, model);
            RField w(static_cast<std::size_t>(grid.size()));
            for (std::int64_t i = 0; i < grid.size(); ++i)
                w[static_cast<std::size_t>(i)] =
                    std::norm(af.a[static_cast<std::size_t>(i)]) / vol;
            per_sample.push_back(std::move(w));
        }

        Stats st = discrepancy(per_sample, WB);
        EpsCell cell;
        cell.eps = eps;
        cell.D = st.D;
        cell.D_sigma = st.sigma;
        cell.raw_D2 = st.raw_D2;
        cell.noise_bias = st.bias;
        cell.max_energy_drift = worst_drift;
        rep.cells.push_back(cell);

        RField mean(static_cast<std::size_t>(grid.size()), 0.0);
        for (const RField& w : per_sample)
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += w[i];
        for (double& v : mean) v /= plan.samples;
        CsvWriter csv({"k1", "k2", "k3", "W_micro", "W_kinetic", "diff"});
        for (std::int64_t i = 0; i < grid.size(); ++i) {
            Vec3 k = grid.kvec(i);
            std::size_t ii = static_cast<std::size_t>(i);
            csv.row_numbers({k[0], k[1], k[2], mean[ii], WB[ii], mean[ii] - WB[ii]});
        }
        write_text_file(outdir + "/micro_w_eps" + std::to_string(ei) + ".csv",
                        header + csv.text());
    }

    rep.monotone_within_sigma = true;
    for (std::size_t i = 0; i + 1 < rep.cells.size(); ++i) {
        double slack = std::sqrt(rep.cells[i].D_sigma * rep.cells[i].D_sigma +
                                 rep.cells[i + 1].D_sigma * rep.cells[i + 1].D_sigma);
        if (rep.cells[i + 1].D > rep.cells[i].D + slack) rep.monotone_within_sigma = false;
    }

    {
        CsvWriter csv({"eps", "D", "D_sigma", "raw_D2", "noise_bias", "max_energy_drift"});
        for (const EpsCell& c : rep.cells)
            csv.row_numbers({c.eps, c.D, c.D_sigma, c.raw_D2, c.noise_bias, c.max_energy_drift});
        write_text_file(outdir + "/discrepancy.csv", header + csv.text());
    }
    {
        std::ostringstream os;
        os << header;
        os << "eta = " << format_full(rep.eta_used) << "\n";
        os << "h = " << format_full(rep.h_used) << "\n";
        os << "monotone_within_sigma = " << (rep.monotone_within_sigma ? "yes" : "no") << "\n";
        for (std::size_t i = 0; i < rep.cells.size(); ++i)
            os << "D[" << format_full(rep.cells[i].eps) << "] = " << format_full(rep.cells[i].D)
               << " +- " << format_full(rep.cells[i].D_sigma) << "\n";
        write_text_file(outdir + "/summary.txt", os.str());
    }
    return rep;
}

KineticComparisonReport rerun_kinetic_comparison(const std::string& manifest_path,
                                                 const std::string& outdir) {
    KeyValueConfig cfg = KeyValueConfig::load_file(manifest_path);
    if (cfg.get_string("kind", "") != "kinetic-compare")
        throw ConfigError("manifest: kind is not kinetic-compare");
    return run_kinetic_comparison(KineticComparisonPlan::from_config(cfg), outdir);
}

// --- diagrams vs series ------------------------------------------------------

KeyValueConfig DiagramSeriesPlan::to_config() const {
    KeyValueConfig cfg;
    cfg.set("kind", "diagram-vs-series");
    cfg.set("model.name", model_name);
    cfg.set_double("model.omega0", omega0);
    cfg.set("w0", w0_expr);
    cfg.set_list("eps", eps_list);
    cfg.set_int("grid.L", L);
    cfg.set_double("t", t);
    cfg.set_double("lambda", lambda);
    cfg.set_double("eta", eta);
    cfg.set_int("n2_census", attach_n2_census ? 1 : 0);
    return cfg;
}

DiagramSeriesPlan DiagramSeriesPlan::from_config(const KeyValueConfig& cfg) {
    cfg.require_known({"kind", "model.name", "model.omega0", "w0", "eps", "grid.L", "t",
                       "lambda", "eta", "n2_census"});
    DiagramSeriesPlan p;
    p.model_name = cfg.get_string("model.name");
    p.omega0 = cfg.get_double("model.omega0", 1.0);
    p.w0_expr = cfg.get_string("w0");
    p.eps_list = cfg.get_list("eps");
    p.L = static_cast<int>(cfg.get_int("grid.L"));
    p.t = cfg.get_double("t");
    p.lambda = cfg.get_double("lambda");
    p.eta = cfg.get_double("eta", 0.0);
    p.attach_n2_census = cfg.get_int("n2_census", 1) != 0;
    return p;
}

DiagramSeriesReport run_diagram_vs_series(const DiagramSeriesPlan& plan,
                                          const std::string& outdir) {
    DispersionModel model = DispersionModel::by_name(plan.model_name, plan.omega0);
    Grid3 grid(plan.L);
    RField W0 = parse_w_expression(plan.w0_expr, grid, model);

    DiagramSeriesReport rep;
    rep.plan = plan;

    CollisionConfig ccfg;
    ccfg.model = model;
    ccfg.lambda = plan.lambda;
    ccfg.N = plan.L;
    double eta_min = 2.0 * model.max_group_speed() / plan.L;
    rep.eta_used = plan.eta > 0.0 ? plan.eta : eta_min;
    ccfg.moll = Mollifier::gaussian(rep.eta_used);
    CollisionKernel kernel(ccfg);

    RField CW = kernel.apply(W0);
    RField W1(CW.size());
    for (std::size_t i = 0; i < CW.size(); ++i) W1[i] = plan.t * CW[i];

    ensure_directory(outdir);
    KeyValueConfig manifest = plan.to_config();
    const std::uint64_t chash = manifest.hash();
    write_text_file(outdir + "/manifest.txt", manifest.serialize());
    const std::string header = report_header(chash, 0);

    std::vector<RField> tables;
    for (std::size_t ei = 0; ei < plan.eps_list.size(); ++ei) {
        DiagramEvalParams p;
        p.eps = plan.eps_list[ei];
        p.t = plan.t;
        p.lambda = plan.lambda;
        p.W = W0;
        p.model = model;
        p.L = plan.L;
        CorrectionResult corr = wigner_correction(1, p);
        rep.max_imag = std::max(rep.max_imag, corr.max_imag);
        double gap = 0.0;
        for (std::size_t i = 0; i < corr.values.size(); ++i)
            gap = std::max(gap, std::abs(corr.values[i] - W1[i]));
        rep.sup_gaps.push_back(gap);
        tables.push_back(corr.values);

        CsvWriter csv({"k1", "k2", "k3", "W1_eps", "W1_series", "diff"});
        for (std::int64_t i = 0; i < grid.size(); ++i) {
            Vec3 k = grid.kvec(i);
            std::size_t ii = static_cast<std::size_t>(i);
            csv.row_numbers({k[0], k[1], k[2], corr.values[ii], W1[ii],
                             corr.values[ii] - W1[ii]});
        }
        write_text_file(outdir + "/w1_eps" + std::to_string(ei) + ".csv", header + csv.text());
    }

    rep.monotone = true;
    for (std::size_t i = 0; i + 1 < rep.sup_gaps.size(); ++i)
        if (rep.sup_gaps[i + 1] > rep.sup_gaps[i]) rep.monotone = false;

    if (plan.attach_n2_census) {
        std::vector<DiagramRecord> recs = diagram_census(2);
        rep.n2_diagrams = static_cast<long long>(recs.size());
        for (const DiagramRecord& r : recs)
            if (r.cls.leading()) ++rep.n2_leading;
        std::ostringstream os;
        os << header;
        write_census(os, recs);
        write_text_file(outdir + "/census_n2.txt", os.str());

        FeynmanDiagram fig = figure_diagram();
        MomentumAssignment ma = assign_momenta(fig);
        rep.figure_class = classify(fig, ma).label();
    }

    {
        CsvWriter csv({"eps", "sup_gap"});
        for (std::size_t i = 0; i < rep.sup_gaps.size(); ++i)
            csv.row_numbers({plan.eps_list[i], rep.sup_gaps[i]});
        write_text_file(outdir + "/gaps.csv", header + csv.text());
    }
    {
        std::ostringstream os;
        os << header;
        os << "eta = " << format_full(rep.eta_used) << "\n";
        os << "monotone = " << (rep.monotone ? "yes" : "no") << "\n";
        os << "max_imag = " << format_full(rep.max_imag) << "\n";
        if (plan.attach_n2_census) {
            os << "n2_diagrams = " << rep.n2_diagrams << "\n";
            os << "n2_leading = " << rep.n2_leading << "\n";
            os << "figure_diagram = " << rep.figure_class << "\n";
        }
        write_text_file(outdir + "/summary.txt", os.str());
    }
    return rep;
}

}  // namespace phonolab
