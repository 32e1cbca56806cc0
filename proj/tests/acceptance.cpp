// Acceptance suite: one pass/fail line per criterion, exit code = failures.

#include "ddrsim/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

using namespace ddr;

namespace {

int g_failures = 0;

void criterion(int n, const char* desc, bool ok, const std::string& detail) {
    std::printf("%s  criterion %2d: %s  [%s]\n", ok ? "PASS" : "FAIL", n, desc, detail.c_str());
    if (!ok) ++g_failures;
}

double now_seconds() {
    using clk = std::chrono::steady_clock;
    static const clk::time_point t0 = clk::now();
    return std::chrono::duration<double>(clk::now() - t0).count();
}

AtomicParams fig2_atoms(double r) {
    AtomicParams a;
    a.Gamma_c = 1e-4;
    a.r = r;
    return a;
}

DriveConfig fig2_drive(double Omega, double d1) {
    DriveConfig d;
    d.G = 1.0;
    d.Omega = Omega;
    d.delta1 = d1;
    return d;
}

struct FigMetrics {
    double transmission = 0;
    BeamMetrics probe;
    BeamMetrics control0;
};

FigMetrics run_clone(ScenarioConfig cfg) {
    const ComplexField2D control0 = sample_control_profile(cfg.control_profile, cfg.grid);
    ControlProfile probe_prof{
        {{cfg.probe.amplitude, cfg.probe.center_x, cfg.probe.center_y, cfg.probe.waist}}};
    const ComplexField2D probe0 = sample_control_profile(probe_prof, cfg.grid);
    PropagationConfig pcfg = cfg.propagation;
    pcfg.k1 = cfg.atomic.k1();
    pcfg.k2 = cfg.atomic.k2();
    const std::vector<double> zs{cfg.propagation.z_total};
    const PropagationRecord rec = propagate(probe0, control0, cfg.atomic, cfg.drive, pcfg, zs);
    FigMetrics out;
    out.transmission = integrated_transmission(probe0, rec.snapshots.back().probe);
    try {
        out.probe = beam_metrics(rec.snapshots.back().probe, Cut{});
    } catch (const NoStructure&) {
        // fully switched-off beams carry no peaks
    }
    out.control0 = beam_metrics(control0, Cut{});
    return out;
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / double(v.size());
}

// --------------------------------------------------------------------------

void criteria_1_2_oracle_equivalence() {
    const double t0 = now_seconds();
    std::mt19937 rng(20250810);
    std::uniform_real_distribution<double> uG(0.1, 2.0), uW(0.0, 0.05), ur(0.0, 1e-3),
        ud(-2.0, 2.0);
    double worst_rel = 0.0, worst_sum = 0.0;
    for (int t = 0; t < 100; ++t) {
        double W = uW(rng), r = ur(rng);
        // non-degenerate guard: stay inside the weak-probe-valid regime
        while (W < 1e-3) W = uW(rng);
        while (r < 1e-5) r = ur(rng);
        AtomicParams a = fig2_atoms(r);
        DriveConfig d;
        d.G = uG(rng);
        d.Omega = W;
        d.delta1 = ud(rng);
        d.delta2 = ud(rng);
        d.delta3 = ud(rng);

        const complexd g{1e-6, 0.0};
        const DensityMatrix rho = steady_state_oracle(a, d, g);
        const complexd oracle = rho[3][0] / g;
        const Populations0 pop = zeroth_order_populations(a, d);
        const complexd closed = rho41_plus(a, d, pop);
        worst_rel = std::max(worst_rel, std::abs(oracle - closed) / std::abs(closed));
        worst_sum = std::max(worst_sum,
                             std::abs(pop.rho11 + pop.rho22 + pop.rho33 + pop.rho44 - 1.0));
    }
    const double elapsed = now_seconds() - t0;
    {
        std::ostringstream ss;
        ss << "max rel err " << worst_rel << ", " << elapsed << " s";
        criterion(1, "closed-form rho41+ matches the weak-probe oracle to 1e-6 over 100 draws",
                  worst_rel <= 1e-6 && elapsed < 30.0, ss.str());
    }
    {
        std::ostringstream ss;
        ss << "max |sum-1| " << worst_sum;
        criterion(2, "closed-form populations sum to 1 within 1e-10 over the same draws",
                  worst_sum <= 1e-10, ss.str());
    }
}

void criterion_3_spectrum_features() {
    const int n = 401;
    auto im_sweep = [&](double Omega, double r) {
        std::vector<double> im(n);
        for (int i = 0; i < n; ++i)
            im[i] = chi41(fig2_atoms(r), fig2_drive(Omega, -3.0 + 6.0 * i / (n - 1))).chi.imag();
        return im;
    };

    const std::vector<double> eit = im_sweep(0.0, 0.0);
    const double eit_peak = *std::max_element(eit.begin(), eit.end());
    const double eit_center = chi41(fig2_atoms(0.0), fig2_drive(0.0, 0.0)).chi.imag();
    const bool ok_a = std::abs(eit_center) <= 1e-2 * eit_peak;

    const double eps = 2e-5;
    const double mia0 = chi41(fig2_atoms(0.0), fig2_drive(0.01, 0.0)).chi.imag();
    const double mia_m = chi41(fig2_atoms(0.0), fig2_drive(0.01, -eps)).chi.imag();
    const double mia_p = chi41(fig2_atoms(0.0), fig2_drive(0.01, eps)).chi.imag();
    const bool ok_b = mia0 > 0.0 && mia0 > mia_m && mia0 > mia_p;

    const double lwi0 = chi41(fig2_atoms(5e-4), fig2_drive(0.01, 0.0)).chi.imag();
    const bool ok_c = lwi0 < 0.0;

    std::ostringstream ss;
    ss << "EIT |Im chi(0)|/peak=" << std::abs(eit_center) / eit_peak << ", MIA Im chi(0)=" << mia0
       << ", LWI Im chi(0)=" << lwi0;
    criterion(3, "Fig.2 spectrum features: EIT transparency, MIA peak, LWI gain",
              ok_a && ok_b && ok_c, ss.str());
}

void criterion_4_symmetry() {
    const int n = 401;
    const AtomicParams a = fig2_atoms(5e-4);
    double worst = 0.0;
    for (int i = 0; i <= n / 2; ++i) {
        const double d1 = -3.0 + 6.0 * i / (n - 1);
        const complexd cp = chi41(a, fig2_drive(0.01, d1)).chi;
        const complexd cm = chi41(a, fig2_drive(0.01, -d1)).chi;
        worst = std::max(worst, std::abs(cp.imag() - cm.imag()));
        worst = std::max(worst, std::abs(cp.real() + cm.real()));
    }
    std::ostringstream ss;
    ss << "max asymmetry " << worst;
    criterion(4, "Im chi even and Re chi odd in delta1 to 1e-12 on a 401-point sweep",
              worst <= 1e-12, ss.str());
}

void criterion_5_free_space() {
    const double lambda = 780e-7, w0 = 0.01;
    const double k = 2.0 * std::numbers::pi / lambda;
    const TransverseGrid g{2048, 1, 0.06, 0.06};
    ComplexField2D probe0(g), chi0(g);
    for (int i = 0; i < g.nx; ++i)
        probe0.at(i, 0) = std::exp(-g.x(i) * g.x(i) / (w0 * w0));

    PropagationConfig cfg;
    cfg.dz = 0.25;
    cfg.z_total = 4.0;
    cfg.k1 = k;
    cfg.k2 = k;
    cfg.boundary.type = Boundary::Periodic;
    const PropagationRecord rec =
        propagate_static(probe0, chi0, cfg, std::vector<double>{4.0});
    const ComplexField2D& out = rec.snapshots.back().probe;
    const BeamMetrics m = beam_metrics(out, Cut{});
    const double w = m.fwhm[0] / std::sqrt(2.0 * std::log(2.0));
    const double width_err = std::abs(w / (w0 * std::sqrt(2.0)) - 1.0);
    const double power_err = std::abs(integrated_transmission(probe0, out) - 1.0);
    std::ostringstream ss;
    ss << "width ratio err " << width_err << ", power err " << power_err;
    criterion(5, "100 um Gaussian doubles its area over 4 cm; power conserved to 1e-10",
              width_err < 0.005 && power_err < 1e-10, ss.str());
}

void criteria_6_9_fig5() {
    const double t0 = now_seconds();
    const ScenarioConfig cfg = preset("fig5_rayleigh_clone");
    const FigMetrics base = run_clone(cfg);
    const double elapsed = now_seconds() - t0;

    const double clone_finesse = base.probe.finesse;
    const double control_finesse = base.control0.finesse;
    const bool ok_ratio = base.probe.central_min_ratio >= 0 && base.probe.central_min_ratio < 0.1;
    const bool ok_finesse = clone_finesse >= 3.0 * control_finesse;
    const bool ok_trans = base.transmission >= 0.88 && base.transmission <= 1.08;
    {
        std::ostringstream ss;
        ss << "central min " << base.probe.central_min_ratio << ", finesse gain "
           << clone_finesse / control_finesse << "x, transmission " << base.transmission << ", "
           << elapsed << " s";
        criterion(6, "Fig.5 cloning: dark center, >=3x finesse, ~98% transmission in <1 min",
                  ok_ratio && ok_finesse && ok_trans && elapsed < 60.0, ss.str());
    }

    // criterion 9: halve dz, double the grid
    ScenarioConfig fine = cfg;
    fine.propagation.dz /= 2.0;
    fine.grid.nx *= 2;
    const FigMetrics ref = run_clone(fine);
    auto rel_change = [](double a, double b, double floor_abs) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_abs});
    };
    const double d_trans = rel_change(base.transmission, ref.transmission, 1e-3);
    const double d_finesse = rel_change(base.probe.finesse, ref.probe.finesse, 1e-3);
    const double d_fwhm = rel_change(mean(base.probe.fwhm), mean(ref.probe.fwhm), 1e-6);
    const double d_ratio = rel_change(base.probe.central_min_ratio, ref.probe.central_min_ratio,
                                      1.0); // ratio on the [0,1] scale
    const double worst = std::max({d_trans, d_finesse, d_fwhm, d_ratio});
    std::ostringstream ss;
    ss << "metric changes: transmission " << d_trans << ", finesse " << d_finesse << ", fwhm "
       << d_fwhm << ", central-min " << d_ratio;
    criterion(9, "Fig.5 metrics change < 1% under dz/2 and grid x2", worst < 0.01, ss.str());
}

void criterion_7_fig7() {
    const double t0 = now_seconds();
    const ScenarioConfig cfg = preset("fig7_sparrow_3peak");
    const ComplexField2D control0 = sample_control_profile(cfg.control_profile, cfg.grid);
    ControlProfile probe_prof{{{cfg.probe.amplitude, 0.0, 0.0, cfg.probe.waist}}};
    const ComplexField2D probe0 = sample_control_profile(probe_prof, cfg.grid);
    PropagationConfig pcfg = cfg.propagation;
    pcfg.k1 = cfg.atomic.k1();
    pcfg.k2 = cfg.atomic.k2();
    const PropagationRecord rec = propagate(probe0, control0, cfg.atomic, cfg.drive, pcfg,
                                            std::vector<double>{1.0});
    const ComplexField2D& out = rec.snapshots.back().probe;

    const std::vector<Peak2D> peaks = find_peaks_2d(out);
    bool ok_peaks = peaks.size() == 3;
    const double tol_x = out.grid().dx(), tol_y = out.grid().dy();
    if (ok_peaks) {
        for (const GaussianPeak& want : cfg.control_profile.peaks) {
            bool matched = false;
            for (const Peak2D& got : peaks)
                if (std::abs(got.x - want.center_x) <= tol_x &&
                    std::abs(got.y - want.center_y) <= tol_y)
                    matched = true;
            ok_peaks = ok_peaks && matched;
        }
    }
    double worst_saddle = 0.0;
    for (std::size_t a = 0; a < peaks.size(); ++a)
        for (std::size_t b = a + 1; b < peaks.size(); ++b)
            worst_saddle = std::max(worst_saddle, saddle_ratio(out, peaks[a], peaks[b]));
    const double trans = integrated_transmission(probe0, out);
    const double elapsed = now_seconds() - t0;
    std::ostringstream ss;
    ss << peaks.size() << " peaks, worst saddle " << worst_saddle << ", transmission " << trans
       << ", " << elapsed << " s";
    criterion(7, "Fig.7: three resolved peaks at the configured centers, ~74% transmission",
              ok_peaks && worst_saddle < 0.8 && trans >= 0.64 && trans <= 0.84 && elapsed < 600.0,
              ss.str());
}

void criterion_8_fig8() {
    auto variant = [&](double Omega, double r, double d1) {
        ScenarioConfig cfg = preset("fig8_switching");
        cfg.atomic.r = r;
        cfg.drive.Omega = Omega;
        cfg.drive.delta1 = d1;
        return run_clone(cfg);
    };
    const FigMetrics lwi = variant(0.01, 1e-4, 1e-4);
    const FigMetrics mia = variant(0.01, 0.0, 1e-4);
    const FigMetrics eit = variant(0.0, 0.0, -5e-3);

    const double lwi_fwhm = mean(lwi.probe.fwhm);
    const double eit_fwhm = eit.probe.fwhm.empty() ? 0.0 : mean(eit.probe.fwhm);
    const bool ok_mia = mia.transmission < 0.10;
    const bool ok_lwi = std::abs(lwi_fwhm - 25e-4) <= 0.3 * 25e-4 &&
                        lwi.transmission >= 0.50 && lwi.transmission <= 0.70;
    const bool ok_eit = std::abs(eit_fwhm - 100e-4) <= 0.3 * 100e-4 && eit.transmission <= 0.10;
    const bool ok_order =
        lwi.transmission > eit.transmission && eit.transmission > mia.transmission;
    std::ostringstream ss;
    ss << "T(LWI)=" << lwi.transmission << " T(EIT)=" << eit.transmission
       << " T(MIA)=" << mia.transmission << ", FWHM(LWI)=" << lwi_fwhm * 1e4
       << " um, FWHM(EIT)=" << eit_fwhm * 1e4 << " um";
    criterion(8, "Fig.8 switching: MIA off, LWI 25 um @ 60%, EIT 100 um @ 5%, ordered",
              ok_mia && ok_lwi && ok_eit && ok_order, ss.str());
}

void criterion_10_scheme_orders() {
    const TransverseGrid g{512, 1, 0.06, 0.06};
    ComplexField2D probe0(g), chi(g);
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        probe0.at(i, 0) = std::exp(-x * x / (0.008 * 0.008));
        chi.at(i, 0) = complexd{2e-6, 2e-7} * std::exp(-x * x / (0.015 * 0.015));
    }
    const double Z = 0.5;
    const double k = 2.0 * std::numbers::pi / 780e-7;

    auto run = [&](Scheme scheme, int nsteps) {
        PropagationConfig cfg;
        cfg.dz = Z / nsteps;
        cfg.z_total = Z;
        cfg.k1 = k;
        cfg.k2 = k;
        cfg.scheme = scheme;
        cfg.boundary.type = Boundary::Periodic;
        return propagate_static(probe0, chi, cfg, std::vector<double>{Z}).snapshots.back().probe;
    };
    auto l2err = [&](const ComplexField2D& a, const ComplexField2D& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.values().size(); ++i)
            s += std::norm(a.values()[i] - b.values()[i]);
        return std::sqrt(s);
    };

    auto fitted_order = [&](Scheme scheme) {
        const ComplexField2D ref = run(scheme, 512);
        const double e1 = l2err(run(scheme, 16), ref);
        const double e2 = l2err(run(scheme, 32), ref);
        return std::log2(e1 / e2);
    };
    const double p2 = fitted_order(Scheme::Strang2);
    const double p4 = fitted_order(Scheme::Yoshida4);
    std::ostringstream ss;
    ss << "Strang2 order " << p2 << ", Yoshida4 order " << p4;
    criterion(10, "observed convergence orders ~2 (Strang2) and ~4 (Yoshida4)",
              p2 >= 1.0 && p2 <= 4.0 && p4 >= 2.0 && p4 <= 8.0, ss.str());
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    std::fflush(stdout);
    try {
        criteria_1_2_oracle_equivalence();
        criterion_3_spectrum_features();
        criterion_4_symmetry();
        criterion_5_free_space();
        criteria_6_9_fig5();
        criterion_7_fig7();
        criterion_8_fig8();
        criterion_10_scheme_orders();
    } catch (const std::exception& e) {
        std::printf("FAIL  acceptance aborted: %s\n", e.what());
        ++g_failures;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
