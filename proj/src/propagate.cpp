#include "ddrsim/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace ddr {

namespace {

constexpr double pi = std::numbers::pi;

/// Spatial angular frequency of FFT bin m out of n with sample spacing d.
inline double fft_freq(int m, int n, double d) {
    const int k = (m <= n / 2) ? m : m - n;
    return 2.0 * pi * k / (n * d);
}

/// exp(-i (kx^2 + ky^2) dz / (2k)) in FFT bin order.
std::vector<complexd> spectral_phase(const TransverseGrid& g, double k, double dz) {
    std::vector<complexd> tab(g.size());
    const double c = -dz / (2.0 * k);
    for (int j = 0; j < g.ny; ++j) {
        const double ky = g.is1d() ? 0.0 : fft_freq(j, g.ny, g.dy());
        for (int i = 0; i < g.nx; ++i) {
            const double kx = fft_freq(i, g.nx, g.dx());
            tab[std::size_t(j) * g.nx + i] = std::polar(1.0, c * (kx * kx + ky * ky));
        }
    }
    return tab;
}

void apply_table(std::span<complexd> v, std::span<const complexd> tab, Exec exec) {
    const bool par = exec == Exec::Parallel;
    const long n = long(v.size());
#pragma omp parallel for if (par)
    for (long i = 0; i < n; ++i) v[i] *= tab[i];
}

void apply_real_table(std::span<complexd> v, std::span<const double> tab, Exec exec) {
    const bool par = exec == Exec::Parallel;
    const long n = long(v.size());
#pragma omp parallel for if (par)
    for (long i = 0; i < n; ++i) v[i] *= tab[i];
}

/// g *= exp(2 i pi k1 chi h); returns true if any |g| exceeded the ceiling.
bool apply_medium(std::span<complexd> v, std::span<const complexd> chi, double k1, double h,
                  double ceiling, Exec exec) {
    const double c = 2.0 * pi * k1 * h;
    const bool par = exec == Exec::Parallel;
    const long n = long(v.size());
    int overflow = 0;
#pragma omp parallel for if (par) reduction(|| : overflow)
    for (long i = 0; i < n; ++i) {
        const complexd x = chi[i];
        v[i] *= std::polar(std::exp(-c * x.imag()), c * x.real());
        overflow = overflow || (std::abs(v[i]) > ceiling);
    }
    return overflow != 0;
}

/// Super-Gaussian absorbing frame transmission for one step of length h.
std::vector<double> boundary_mask(const TransverseGrid& g, const Boundary& b, double h) {
    std::vector<double> mask(g.size(), 1.0);
    const double x0 = (1.0 - b.width) * g.extent_x;
    const double y0 = (1.0 - b.width) * g.extent_y;
    auto ramp = [](double a, double a0, double a1) {
        if (std::abs(a) <= a0) return 0.0;
        const double u = (std::abs(a) - a0) / (a1 - a0);
        return u * u * u * u;
    };
    for (int j = 0; j < g.ny; ++j) {
        const double ry = g.is1d() ? 0.0 : ramp(g.y(j), y0, g.extent_y);
        for (int i = 0; i < g.nx; ++i) {
            const double rx = ramp(g.x(i), x0, g.extent_x);
            mask[std::size_t(j) * g.nx + i] = std::exp(-b.strength * std::abs(h) * (rx + ry));
        }
    }
    return mask;
}

double min_im(std::span<const complexd> chi) {
    double m = 0.0;
    for (const complexd& c : chi) m = std::min(m, c.imag());
    return m;
}

struct SubstepTables {
    double h = 0.0;
    std::vector<complexd> probe_half;
    std::vector<complexd> control_half;
};

} // namespace

void PropagationConfig::validate() const {
    if (!(dz > 0)) throw std::invalid_argument("propagation.dz must be > 0");
    if (!(z_total >= dz)) throw std::invalid_argument("propagation.z_total must be >= dz");
    if (!(k1 > 0) || !(k2 > 0)) throw std::invalid_argument("propagation wavenumbers must be > 0");
    if (chi_update_every < 1)
        throw std::invalid_argument("propagation.chi_update_every must be >= 1");
    if (!(amplitude_ceiling > 0) || !(stability_bound > 0))
        throw std::invalid_argument("propagation guards must be > 0");
    if (boundary.type == Boundary::Absorbing &&
        (!(boundary.width > 0) || boundary.width >= 1 || !(boundary.strength >= 0)))
        throw std::invalid_argument("propagation.boundary width must be in (0,1), strength >= 0");
}

ComplexField2D diffraction_step(const ComplexField2D& field, double k, double dz, const Fft2D& fft,
                                Exec exec) {
    if (!(field.grid() == fft.grid()))
        throw std::invalid_argument("diffraction_step: field and FFT plan grids differ");
    ComplexField2D out = field;
    if (dz == 0.0) return out;
    const std::vector<complexd> tab = spectral_phase(field.grid(), k, dz);
    fft.forward(out.data(), exec);
    apply_table(out.values(), tab, exec);
    fft.inverse(out.data(), exec);
    out.set_z(field.z() + dz);
    return out;
}

ComplexField2D medium_step(const ComplexField2D& probe, const ComplexField2D& chi_map, double k1,
                           double dz, double amplitude_ceiling, Exec exec) {
    if (!(probe.grid() == chi_map.grid()))
        throw std::invalid_argument("medium_step: probe and chi map grids differ");
    ComplexField2D out = probe;
    if (apply_medium(out.values(), chi_map.values(), k1, dz, amplitude_ceiling, exec))
        throw AmplificationOverflow("probe amplitude exceeded the configured ceiling "
                                    "(runaway gain or unphysical parameters)");
    return out;
}

namespace {

/// Shared split-operator driver. chi is refreshed through `refresh_chi`
/// (a no-op for the static-map path).
PropagationRecord run_split_operator(
    const ComplexField2D& probe0, const ComplexField2D* control0, const ComplexField2D* fixed_chi,
    const AtomicParams* params, const DriveConfig* drive, const PropagationConfig& cfg,
    std::span<const double> snapshot_zs) {
    cfg.validate();
    probe0.grid().validate();
    const TransverseGrid& grid = probe0.grid();
    if (control0 && !(control0->grid() == grid))
        throw std::invalid_argument("propagate: probe and control grids differ");
    if (fixed_chi && !(fixed_chi->grid() == grid))
        throw std::invalid_argument("propagate: probe and chi-map grids differ");

    const long nsteps = std::max(1L, std::lround(cfg.z_total / cfg.dz));
    const double h_step = cfg.z_total / double(nsteps);

    // scheme substep lengths per full step
    std::vector<double> coeffs;
    if (cfg.scheme == Scheme::Strang2) {
        coeffs = {1.0};
    } else {
        const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
        coeffs = {w1, 1.0 - 2.0 * w1, w1};
    }

    std::vector<SubstepTables> tables;
    for (double c : coeffs) {
        const double h = c * h_step;
        SubstepTables t;
        t.h = h;
        t.probe_half = spectral_phase(grid, cfg.k1, h / 2.0);
        if (control0) t.control_half = spectral_phase(grid, cfg.k2, h / 2.0);
        tables.push_back(std::move(t));
    }

    std::vector<double> mask;
    if (cfg.boundary.type == Boundary::Absorbing && cfg.boundary.strength > 0)
        mask = boundary_mask(grid, cfg.boundary, h_step);

    std::set<long> snap_steps{0};
    for (double z : snapshot_zs)
        snap_steps.insert(std::clamp(std::lround(z / h_step), 0L, nsteps));

    Fft2D fft(grid);
    const Exec exec = cfg.exec;
    ComplexField2D probe = probe0;
    ComplexField2D control = control0 ? *control0 : ComplexField2D();
    ComplexField2D chi = fixed_chi ? *fixed_chi : ComplexField2D();
    bool have_chi = fixed_chi != nullptr;
    bool gain_present = have_chi && min_im(chi.values()) < 0.0;

    PropagationRecord rec;
    auto record = [&](double z) {
        probe.set_z(z);
        Snapshot s;
        s.z = z;
        s.probe = probe;
        if (control0) {
            control.set_z(z);
            s.control = control;
        }
        rec.snapshots.push_back(std::move(s));
    };
    record(0.0);

    double prev_power = probe.power();
    double max_drift = 0.0;
    long substep_counter = 0;

    for (long step = 0; step < nsteps; ++step) {
        for (std::size_t s = 0; s < tables.size(); ++s) {
            const SubstepTables& t = tables[s];

            if (control0) {
                fft.forward(control.data(), exec);
                apply_table(control.values(), t.control_half, exec);
                fft.inverse(control.data(), exec);
                if (substep_counter % cfg.chi_update_every == 0 || !have_chi) {
                    chi = susceptibility_map(control, *params, *drive, exec);
                    have_chi = true;
                    gain_present = gain_present || min_im(chi.values()) < 0.0;
                }
            }

            fft.forward(probe.data(), exec);
            apply_table(probe.values(), t.probe_half, exec);
            fft.inverse(probe.data(), exec);
            if (apply_medium(probe.values(), chi.values(), cfg.k1, t.h, cfg.amplitude_ceiling,
                             exec))
                throw AmplificationOverflow("probe amplitude exceeded the configured ceiling at z="
                                            + std::to_string((step + 1) * h_step));
            fft.forward(probe.data(), exec);
            apply_table(probe.values(), t.probe_half, exec);
            fft.inverse(probe.data(), exec);

            if (control0) {
                fft.forward(control.data(), exec);
                apply_table(control.values(), t.control_half, exec);
                fft.inverse(control.data(), exec);
            }
            ++substep_counter;
        }

        if (!mask.empty()) {
            apply_real_table(probe.values(), mask, exec);
            if (control0) apply_real_table(control.values(), mask, exec);
        }

        const double power = probe.power();
        if (prev_power > 0) {
            const double rel = (power - prev_power) / prev_power;
            max_drift = std::max(max_drift, std::abs(rel));
            if (!gain_present && rel > cfg.stability_bound) {
                std::ostringstream msg;
                msg << "probe power grew by " << rel * 100 << "% in one step at z="
                    << (step + 1) * h_step << " cm with no gain present";
                throw StepUnstable(msg.str());
            }
        }
        prev_power = power;

        if (snap_steps.count(step + 1)) record((step + 1) * h_step);
    }

    rec.max_power_step_change = max_drift;
    return rec;
}

} // namespace

PropagationRecord propagate(const ComplexField2D& probe0, const ComplexField2D& control0,
                            const AtomicParams& params, const DriveConfig& drive_template,
                            const PropagationConfig& config, std::span<const double> snapshot_zs) {
    params.validate();
    drive_template.validate();
    return run_split_operator(probe0, &control0, nullptr, &params, &drive_template, config,
                              snapshot_zs);
}

PropagationRecord propagate_static(const ComplexField2D& probe0, const ComplexField2D& chi_map,
                                   const PropagationConfig& config,
                                   std::span<const double> snapshot_zs) {
    return run_split_operator(probe0, nullptr, &chi_map, nullptr, nullptr, config, snapshot_zs);
}

} // namespace ddr
