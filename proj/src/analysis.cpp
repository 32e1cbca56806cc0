#include "ddrsim/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace ddr {

std::vector<std::size_t> find_peak_indices(std::span<const double> intensity,
                                           double noise_floor_frac) {
    std::vector<std::size_t> out;
    if (intensity.size() < 3) return out;
    const double gmax = *std::max_element(intensity.begin(), intensity.end());
    const double floor = gmax * noise_floor_frac;
    for (std::size_t i = 1; i + 1 < intensity.size(); ++i) {
        if (intensity[i] > floor && intensity[i] > intensity[i - 1] &&
            intensity[i] > intensity[i + 1])
            out.push_back(i);
    }
    return out;
}

double integrated_transmission(const ComplexField2D& input, const ComplexField2D& output) {
    if (!(input.grid() == output.grid()))
        throw std::invalid_argument("transmission requires fields on the same grid");
    const double pin = input.power();
    if (pin <= 0.0) throw ZeroInput("input field carries zero power");
    return output.power() / pin;
}

namespace {

/// Parabolic refinement of a sampled maximum; returns the sub-cell offset in [-0.5, 0.5].
double parabolic_offset(double ym, double y0, double yp) {
    const double denom = ym - 2.0 * y0 + yp;
    if (denom == 0.0) return 0.0;
    return std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
}

/// FWHM of the peak at index p by linear interpolation of the half-maximum crossings.
/// Returns 0 when a crossing never happens inside the profile (unbounded peak).
double interpolated_fwhm(std::span<const double> I, std::span<const double> x, std::size_t p) {
    const double half = 0.5 * I[p];
    double left = x.front(), right = x.back();
    bool left_ok = false, right_ok = false;
    for (std::size_t i = p; i-- > 0;) {
        if (I[i] <= half) {
            const double t = (half - I[i]) / (I[i + 1] - I[i]);
            left = x[i] + t * (x[i + 1] - x[i]);
            left_ok = true;
            break;
        }
    }
    for (std::size_t i = p + 1; i < I.size(); ++i) {
        if (I[i] <= half) {
            const double t = (I[i - 1] - half) / (I[i - 1] - I[i]);
            right = x[i - 1] + t * (x[i] - x[i - 1]);
            right_ok = true;
            break;
        }
    }
    return (left_ok && right_ok) ? right - left : 0.0;
}

} // namespace

BeamMetrics beam_metrics(const ComplexField2D& field, const Cut& cut, double noise_floor_frac) {
    const CutProfile prof = extract_cut(field, cut);
    const std::vector<std::size_t> idx = find_peak_indices(prof.intensity, noise_floor_frac);
    if (idx.empty()) throw NoStructure("no intensity peak clears the noise floor");

    BeamMetrics m;
    for (std::size_t p : idx) {
        const double off = parabolic_offset(prof.intensity[p - 1], prof.intensity[p],
                                            prof.intensity[p + 1]);
        m.peaks.push_back({prof.coord[p] + off * prof.spacing, prof.intensity[p]});
        m.fwhm.push_back(interpolated_fwhm(prof.intensity, prof.coord, p));
    }

    if (idx.size() >= 2) {
        double spacing = 0.0, width = 0.0;
        for (std::size_t n = 0; n + 1 < idx.size(); ++n)
            spacing += m.peaks[n + 1].location - m.peaks[n].location;
        spacing /= double(idx.size() - 1);
        for (double w : m.fwhm) width += w;
        width /= double(m.fwhm.size());
        m.finesse = width > 0 ? spacing / width : 0.0;

        double worst = 0.0;
        for (std::size_t n = 0; n + 1 < idx.size(); ++n) {
            double saddle = prof.intensity[idx[n]];
            for (std::size_t k = idx[n]; k <= idx[n + 1]; ++k)
                saddle = std::min(saddle, prof.intensity[k]);
            const double ref = std::min(prof.intensity[idx[n]], prof.intensity[idx[n + 1]]);
            worst = std::max(worst, ref > 0 ? saddle / ref : 1.0);
        }
        m.central_min_ratio = worst;
    }
    return m;
}

std::vector<Peak2D> find_peaks_2d(const ComplexField2D& field, double noise_floor_frac) {
    const TransverseGrid& g = field.grid();
    std::vector<Peak2D> out;
    if (g.is1d()) {
        Cut cut;
        for (const Peak& p : beam_metrics(field, cut, noise_floor_frac).peaks)
            out.push_back({p.location, 0.0, p.height});
        return out;
    }
    double gmax = 0.0;
    for (const complexd& v : field.values()) gmax = std::max(gmax, std::norm(v));
    const double floor = gmax * noise_floor_frac;
    for (int j = 1; j + 1 < g.ny; ++j) {
        for (int i = 1; i + 1 < g.nx; ++i) {
            const double c = std::norm(field.at(i, j));
            if (c <= floor) continue;
            bool is_max = true;
            for (int dj = -1; dj <= 1 && is_max; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    if (std::norm(field.at(i + di, j + dj)) >= c) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) out.push_back({g.x(i), g.y(j), c});
        }
    }
    return out;
}

double saddle_ratio(const ComplexField2D& field, const Peak2D& a, const Peak2D& b) {
    const TransverseGrid& g = field.grid();
    auto bilinear = [&](double x, double y) {
        const double fx = x / g.dx() + g.nx / 2;
        const double fy = g.is1d() ? 0.0 : y / g.dy() + g.ny / 2;
        const int i = std::clamp(int(std::floor(fx)), 0, g.nx - 2);
        const int j = std::clamp(int(std::floor(fy)), 0, std::max(g.ny - 2, 0));
        const double tx = std::clamp(fx - i, 0.0, 1.0);
        const double ty = g.is1d() ? 0.0 : std::clamp(fy - j, 0.0, 1.0);
        const int j1 = g.is1d() ? 0 : j + 1;
        const double v00 = std::norm(field.at(i, j));
        const double v10 = std::norm(field.at(i + 1, j));
        const double v01 = std::norm(field.at(i, j1));
        const double v11 = std::norm(field.at(i + 1, j1));
        return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 +
               tx * ty * v11;
    };
    const int samples = 256;
    double saddle = std::min(a.height, b.height);
    for (int s = 1; s < samples; ++s) {
        const double t = double(s) / samples;
        saddle = std::min(saddle, bilinear(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
    }
    const double ref = std::min(a.height, b.height);
    return ref > 0 ? saddle / ref : 1.0;
}

} // namespace ddr
