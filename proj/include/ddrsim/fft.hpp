#ifndef DDRSIM_FFT_HPP
#define DDRSIM_FFT_HPP

#include <complex>
#include <memory>

#include "ddrsim/field.hpp"

namespace ddr {

/// In-place complex 2D FFT for one grid shape. Row and column passes are 1D
/// FFTW transforms executed across lines, optionally under OpenMP; the plan is
/// created once (FFTW_ESTIMATE, deterministic) and shared via the new-array
/// execute interface, which is thread-safe.
class Fft2D {
public:
    explicit Fft2D(const TransverseGrid& grid);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    const TransverseGrid& grid() const { return grid_; }

    /// Unnormalized forward transform.
    void forward(complexd* data, Exec exec = Exec::Parallel) const;
    /// Inverse transform scaled by 1/(nx*ny).
    void inverse(complexd* data, Exec exec = Exec::Parallel) const;

private:
    struct Impl;
    TransverseGrid grid_;
    std::unique_ptr<Impl> impl_;
};

} // namespace ddr

#endif
