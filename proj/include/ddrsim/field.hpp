#ifndef DDRSIM_FIELD_HPP
#define DDRSIM_FIELD_HPP

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ddrsim/atomic.hpp"

namespace ddr {

/// Kernel execution policy. Serial and Parallel produce bit-identical results;
/// the serial path is the reference the tests compare against.
enum class Exec { Serial, Parallel };

/// Uniform transverse grid centered on the origin, x_i = (i - nx/2) dx.
/// ny == 1 selects the 1D (y = 0 cut) mode.
struct TransverseGrid {
    int nx = 1024;
    int ny = 1;
    double extent_x = 0.06; ///< half-width, cm
    double extent_y = 0.06;

    double dx() const { return 2.0 * extent_x / nx; }
    double dy() const { return 2.0 * extent_y / ny; }
    double x(int i) const { return (i - nx / 2) * dx(); }
    double y(int j) const { return is1d() ? 0.0 : (j - ny / 2) * dy(); }
    bool is1d() const { return ny == 1; }
    double cell_measure() const { return is1d() ? dx() : dx() * dy(); }
    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
    void validate() const;

    bool operator==(const TransverseGrid&) const = default;
};

/// Sampled complex envelope on a transverse grid at propagation distance z.
class ComplexField2D {
public:
    ComplexField2D() = default;
    ComplexField2D(const TransverseGrid& grid, double z = 0.0)
        : grid_(grid), z_(z), values_(grid.size()) {}

    const TransverseGrid& grid() const { return grid_; }
    double z() const { return z_; }
    void set_z(double z) { z_ = z; }

    complexd& at(int ix, int iy) { return values_[std::size_t(iy) * grid_.nx + ix]; }
    const complexd& at(int ix, int iy) const { return values_[std::size_t(iy) * grid_.nx + ix]; }
    std::span<complexd> values() { return values_; }
    std::span<const complexd> values() const { return values_; }
    complexd* data() { return values_.data(); }
    const complexd* data() const { return values_.data(); }

    /// sum |v|^2 dx (dy), i.e. the integrated beam power.
    double power() const;

private:
    TransverseGrid grid_;
    double z_ = 0.0;
    std::vector<complexd> values_;
};

/// One Gaussian component of the control image, amplitude in gamma units.
struct GaussianPeak {
    double amplitude = 1.0;
    double center_x = 0.0; ///< a_i, cm
    double center_y = 0.0; ///< b_i, cm
    double waist = 0.01;   ///< w_c, cm
};

/// Control image: sum of Gaussian peaks.
struct ControlProfile {
    std::vector<GaussianPeak> peaks;
    void validate() const;
};

enum class Resolution { Resolved, RayleighLimited, SparrowLimited, Unresolved };

struct ResolutionClass {
    Resolution kind = Resolution::Unresolved;
    double central_min_ratio = 1.0;
};

const char* to_string(Resolution r);

/// Cut through a 2D field: a row (along x) or column (along y) nearest to `offset`.
struct Cut {
    enum Axis { AlongX, AlongY } axis = AlongX;
    double offset = 0.0; ///< transverse position of the cut, cm
};

/// Intensity profile |f|^2 sampled along a cut, with matching coordinates.
struct CutProfile {
    std::vector<double> coord;
    std::vector<double> intensity;
    double spacing = 0.0;
};

CutProfile extract_cut(const ComplexField2D& field, const Cut& cut);

/// Sample G(x,y) = sum_i G0_i exp(-[(x-a_i)^2 + (y-b_i)^2] / w_c^2) at z = 0.
/// Warns on stderr when a peak center lies outside the grid extent.
ComplexField2D sample_control_profile(const ControlProfile& profile, const TransverseGrid& grid,
                                      Exec exec = Exec::Parallel);

/// Classify a doublet cut by its peak-normalized central minimum:
/// < 0.4 Resolved, [0.4, 0.6) Rayleigh, [0.6, 0.8) Sparrow, else Unresolved.
/// Throws NoStructure when fewer than two peaks rise above the noise floor.
ResolutionClass classify_resolution(const ComplexField2D& field, const Cut& cut);

/// Pointwise chi41 with G overridden by |control(x,y)|; the drive template
/// supplies Omega, detunings (and the atomic params supply r). Degenerate
/// samples route through the oracle fallback; unresolvable samples fail the
/// whole map with the sample location in the message.
ComplexField2D susceptibility_map(const ComplexField2D& control, const AtomicParams& params,
                                  const DriveConfig& drive_template, Exec exec = Exec::Parallel);

} // namespace ddr

#endif
