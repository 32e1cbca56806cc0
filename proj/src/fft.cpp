#include "ddrsim/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace ddr {

namespace {

// FFTW's planner is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline fftw_complex* cast(complexd* p) { return reinterpret_cast<fftw_complex*>(p); }

void run_lines(const TransverseGrid& g, fftw_plan row, fftw_plan col, complexd* data, Exec exec) {
    const bool par = exec == Exec::Parallel;
#pragma omp parallel for if (par)
    for (int j = 0; j < g.ny; ++j) {
        complexd* line = data + std::size_t(j) * g.nx;
        fftw_execute_dft(row, cast(line), cast(line));
    }
    if (col) {
#pragma omp parallel for if (par)
        for (int i = 0; i < g.nx; ++i) fftw_execute_dft(col, cast(data + i), cast(data + i));
    }
}

} // namespace

struct Fft2D::Impl {
    fftw_plan row_fwd = nullptr, row_bwd = nullptr;
    fftw_plan col_fwd = nullptr, col_bwd = nullptr;
};

Fft2D::Fft2D(const TransverseGrid& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
    grid_.validate();
    std::vector<complexd> scratch(grid_.size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;

    std::lock_guard lock(planner_mutex());
    impl_->row_fwd = fftw_plan_dft_1d(grid_.nx, cast(scratch.data()), cast(scratch.data()),
                                      FFTW_FORWARD, flags);
    impl_->row_bwd = fftw_plan_dft_1d(grid_.nx, cast(scratch.data()), cast(scratch.data()),
                                      FFTW_BACKWARD, flags);
    if (!grid_.is1d()) {
        const int n[1] = {grid_.ny};
        impl_->col_fwd = fftw_plan_many_dft(1, n, 1, cast(scratch.data()), nullptr, grid_.nx, 1,
                                            cast(scratch.data()), nullptr, grid_.nx, 1,
                                            FFTW_FORWARD, flags);
        impl_->col_bwd = fftw_plan_many_dft(1, n, 1, cast(scratch.data()), nullptr, grid_.nx, 1,
                                            cast(scratch.data()), nullptr, grid_.nx, 1,
                                            FFTW_BACKWARD, flags);
    }
}

Fft2D::~Fft2D() {
    std::lock_guard lock(planner_mutex());
    for (fftw_plan p : {impl_->row_fwd, impl_->row_bwd, impl_->col_fwd, impl_->col_bwd})
        if (p) fftw_destroy_plan(p);
}

void Fft2D::forward(complexd* data, Exec exec) const {
    run_lines(grid_, impl_->row_fwd, impl_->col_fwd, data, exec);
}

void Fft2D::inverse(complexd* data, Exec exec) const {
    run_lines(grid_, impl_->row_bwd, impl_->col_bwd, data, exec);
    const double scale = 1.0 / double(grid_.size());
    const bool par = exec == Exec::Parallel;
    const long n = long(grid_.size());
#pragma omp parallel for if (par)
    for (long i = 0; i < n; ++i) data[i] *= scale;
}

} // namespace ddr
