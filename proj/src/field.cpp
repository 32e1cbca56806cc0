#include "ddrsim/field.hpp"

#include "ddrsim/analysis.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace ddr {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
} // namespace

void TransverseGrid::validate() const {
    if (!(extent_x > 0) || !(extent_y > 0))
        throw std::invalid_argument("grid extents must be > 0");
    if (!power_of_two(nx) || nx < 4)
        throw std::invalid_argument("grid.nx must be a power of two >= 4");
    if (ny != 1 && (!power_of_two(ny) || ny < 4))
        throw std::invalid_argument("grid.ny must be 1 (1D mode) or a power of two >= 4");
}

double ComplexField2D::power() const {
    double sum = 0.0;
    for (const complexd& v : values_) sum += std::norm(v);
    return sum * grid_.cell_measure();
}

void ControlProfile::validate() const {
    if (peaks.empty()) throw std::invalid_argument("control profile needs at least one peak");
    for (const GaussianPeak& p : peaks)
        if (!(p.waist > 0)) throw std::invalid_argument("control peak waist must be > 0");
}

const char* to_string(Resolution r) {
    switch (r) {
    case Resolution::Resolved: return "Resolved";
    case Resolution::RayleighLimited: return "RayleighLimited";
    case Resolution::SparrowLimited: return "SparrowLimited";
    default: return "Unresolved";
    }
}

CutProfile extract_cut(const ComplexField2D& field, const Cut& cut) {
    const TransverseGrid& g = field.grid();
    CutProfile out;
    if (cut.axis == Cut::AlongX) {
        int j = g.is1d() ? 0 : int(std::lround(cut.offset / g.dy())) + g.ny / 2;
        j = std::clamp(j, 0, g.ny - 1);
        out.coord.resize(g.nx);
        out.intensity.resize(g.nx);
        for (int i = 0; i < g.nx; ++i) {
            out.coord[i] = g.x(i);
            out.intensity[i] = std::norm(field.at(i, j));
        }
        out.spacing = g.dx();
    } else {
        if (g.is1d()) throw std::invalid_argument("AlongY cut requested on a 1D grid");
        int i = std::clamp(int(std::lround(cut.offset / g.dx())) + g.nx / 2, 0, g.nx - 1);
        out.coord.resize(g.ny);
        out.intensity.resize(g.ny);
        for (int j = 0; j < g.ny; ++j) {
            out.coord[j] = g.y(j);
            out.intensity[j] = std::norm(field.at(i, j));
        }
        out.spacing = g.dy();
    }
    return out;
}

ComplexField2D sample_control_profile(const ControlProfile& profile, const TransverseGrid& grid,
                                      Exec exec) {
    profile.validate();
    grid.validate();
    for (const GaussianPeak& p : profile.peaks) {
        if (std::abs(p.center_x) > grid.extent_x ||
            (!grid.is1d() && std::abs(p.center_y) > grid.extent_y))
            std::cerr << "warning: control peak at (" << p.center_x << ", " << p.center_y
                      << ") cm lies outside the grid extent\n";
    }

    ComplexField2D field(grid, 0.0);
    const bool par = exec == Exec::Parallel;
    const long n = long(grid.size());
    const int nx = grid.nx;
    complexd* out = field.data();
#pragma omp parallel for if (par)
    for (long k = 0; k < n; ++k) {
        const double x = grid.x(int(k % nx));
        const double y = grid.y(int(k / nx));
        double amp = 0.0;
        for (const GaussianPeak& p : profile.peaks) {
            const double rx = x - p.center_x;
            const double ry = y - p.center_y;
            amp += p.amplitude * std::exp(-(rx * rx + ry * ry) / (p.waist * p.waist));
        }
        out[k] = amp;
    }
    return field;
}

ResolutionClass classify_resolution(const ComplexField2D& field, const Cut& cut) {
    const CutProfile prof = extract_cut(field, cut);
    const std::vector<std::size_t> peaks = find_peak_indices(prof.intensity);
    if (peaks.size() < 2)
        throw NoStructure("doublet classification requested but the cut has fewer than two "
                          "intensity maxima");

    // deepest saddle between adjacent peaks, normalized by the lower flanking peak
    double worst = 0.0;
    for (std::size_t n = 0; n + 1 < peaks.size(); ++n) {
        double saddle = prof.intensity[peaks[n]];
        for (std::size_t k = peaks[n]; k <= peaks[n + 1]; ++k)
            saddle = std::min(saddle, prof.intensity[k]);
        const double ref = std::min(prof.intensity[peaks[n]], prof.intensity[peaks[n + 1]]);
        worst = std::max(worst, ref > 0 ? saddle / ref : 1.0);
    }

    ResolutionClass out;
    out.central_min_ratio = worst;
    if (worst < 0.4)
        out.kind = Resolution::Resolved;
    else if (worst < 0.6)
        out.kind = Resolution::RayleighLimited;
    else if (worst < 0.8)
        out.kind = Resolution::SparrowLimited;
    else
        out.kind = Resolution::Unresolved;
    return out;
}

ComplexField2D susceptibility_map(const ComplexField2D& control, const AtomicParams& params,
                                  const DriveConfig& drive_template, Exec exec) {
    params.validate();
    drive_template.validate();
    const TransverseGrid& g = control.grid();
    ComplexField2D chi(g, control.z());

    const bool par = exec == Exec::Parallel;
    std::exception_ptr error;
    std::string where;
    const long n = long(g.size());
    const int nx = g.nx;
    const complexd* in = control.data();
    complexd* out = chi.data();

#pragma omp parallel for if (par)
    for (long k = 0; k < n; ++k) {
        try {
            DriveConfig d = drive_template;
            d.G = std::abs(in[k]);
            out[k] = chi41(params, d).chi;
        } catch (...) {
#pragma omp critical(ddr_chi_map_error)
            if (!error) {
                error = std::current_exception();
                const int i = int(k % nx), j = int(k / nx);
                std::ostringstream loc;
                loc << "susceptibility map failed at sample (" << i << ", " << j << "), x="
                    << g.x(i) << " cm, y=" << g.y(j) << " cm: ";
                where = loc.str();
            }
        }
    }

    if (error) {
        try {
            std::rethrow_exception(error);
        } catch (const DegenerateParameters& e) {
            throw DegenerateParameters(where + e.what());
        } catch (const SingularSystem& e) {
            throw SingularSystem(where + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error(where + e.what());
        }
    }
    return chi;
}

} // namespace ddr
