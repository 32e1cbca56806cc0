#ifndef DDRSIM_ANALYSIS_HPP
#define DDRSIM_ANALYSIS_HPP

#include <vector>

#include "ddrsim/field.hpp"

namespace ddr {

struct Peak {
    double location = 0.0; ///< cm (parabolic sub-cell refinement)
    double height = 0.0;   ///< intensity at the maximum
};

struct Peak2D {
    double x = 0.0, y = 0.0;
    double height = 0.0;
};

/// Quantitative beam observables along a cut.
struct BeamMetrics {
    std::vector<Peak> peaks;
    std::vector<double> fwhm;              ///< per peak, cm
    double finesse = 0.0;                  ///< mean peak spacing / mean FWHM (>= 2 peaks)
    double central_min_ratio = -1.0;       ///< deepest saddle / flanking peak; -1 when undefined
    double integrated_transmission = -1.0; ///< filled by callers that track an input field
};

/// Strict local maxima of a sampled intensity profile above noise_floor_frac
/// of the global maximum.
std::vector<std::size_t> find_peak_indices(std::span<const double> intensity,
                                           double noise_floor_frac = 0.01);

/// Output power / input power on a common grid. Throws ZeroInput.
double integrated_transmission(const ComplexField2D& input, const ComplexField2D& output);

/// Peaks, interpolated FWHM, finesse and central-minimum ratio of a cut.
/// Throws NoStructure when no peak clears the noise floor.
BeamMetrics beam_metrics(const ComplexField2D& field, const Cut& cut,
                         double noise_floor_frac = 0.01);

/// Strict 8-neighborhood intensity maxima of a 2D field above the floor.
std::vector<Peak2D> find_peaks_2d(const ComplexField2D& field, double noise_floor_frac = 0.01);

/// Minimum intensity along the segment joining two 2D peaks, normalized by the
/// lower of the two peak heights.
double saddle_ratio(const ComplexField2D& field, const Peak2D& a, const Peak2D& b);

} // namespace ddr

#endif
