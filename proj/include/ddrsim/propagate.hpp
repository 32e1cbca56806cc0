#ifndef DDRSIM_PROPAGATE_HPP
#define DDRSIM_PROPAGATE_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ddrsim/analysis.hpp"
#include "ddrsim/fft.hpp"
#include "ddrsim/field.hpp"

namespace ddr {

enum class Scheme { Strang2, Yoshida4 };

struct Boundary {
    enum Type { Periodic, Absorbing } type = Absorbing;
    double width = 0.1;      ///< frame width as a fraction of the half-extent
    double strength = 1e3;   ///< peak absorption rate in the frame, 1/cm
};

struct PropagationConfig {
    double dz = 25e-4;       ///< step, cm
    double z_total = 2.5;    ///< cell length, cm
    double k1 = 0.0;         ///< probe wavenumber, 1/cm
    double k2 = 0.0;         ///< control wavenumber, 1/cm
    Scheme scheme = Scheme::Strang2;
    Boundary boundary{};
    int chi_update_every = 1;       ///< rebuild the chi map every N substeps
    double amplitude_ceiling = 1e3; ///< |g| limit before AmplificationOverflow
    double stability_bound = 0.2;   ///< per-step relative power growth allowed at zero gain
    Exec exec = Exec::Parallel;
    void validate() const;
};

struct Snapshot {
    double z = 0.0;
    ComplexField2D probe;
    ComplexField2D control;
};

struct PropagationRecord {
    std::vector<Snapshot> snapshots; ///< z strictly increasing, first at z = 0
    std::vector<std::pair<double, BeamMetrics>> metrics_per_z;
    double max_power_step_change = 0.0; ///< convergence indicator
};

/// Exact free-space step: every spectral amplitude is multiplied by
/// exp(-i (kx^2 + ky^2) dz / (2k)). Power is conserved to roundoff.
ComplexField2D diffraction_step(const ComplexField2D& field, double k, double dz,
                                const Fft2D& fft, Exec exec = Exec::Parallel);

/// Pointwise medium response: g *= exp(2 i pi k1 chi(x,y) dz). Im chi > 0
/// attenuates, Im chi < 0 amplifies. Throws AmplificationOverflow past the ceiling.
ComplexField2D medium_step(const ComplexField2D& probe, const ComplexField2D& chi_map,
                           double k1, double dz, double amplitude_ceiling = 1e3,
                           Exec exec = Exec::Parallel);

/// Co-evolve probe and control to z_total. The control diffracts freely and is
/// independent of the probe; the chi map is rebuilt from the control at each
/// substep midpoint. Snapshots are recorded at the requested z values (z = 0 is
/// always included).
PropagationRecord propagate(const ComplexField2D& probe0, const ComplexField2D& control0,
                            const AtomicParams& params, const DriveConfig& drive_template,
                            const PropagationConfig& config, std::span<const double> snapshot_zs);

/// Probe-only propagation through a frozen chi map (test and utility path;
/// shares the stepper with propagate()).
PropagationRecord propagate_static(const ComplexField2D& probe0, const ComplexField2D& chi_map,
                                   const PropagationConfig& config,
                                   std::span<const double> snapshot_zs);

} // namespace ddr

#endif
