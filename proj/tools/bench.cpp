// Timing harness comparing the serial reference path against the OpenMP path
// for the hot kernels: control sampling, chi map evaluation, FFT, diffraction
// and medium steps.

#include <chrono>
#include <cstdio>
#include <omp.h>

#include "ddrsim/propagate.hpp"
#include "ddrsim/scenario.hpp"

using namespace ddr;

namespace {

template <class F> double time_best(F&& fn, int reps = 3) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, dt);
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-24s %10.4f ms %10.4f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

void bench_grid(const TransverseGrid& grid, const char* label) {
    std::printf("\n-- %s (%d x %d) --\n", label, grid.nx, grid.ny);
    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    AtomicParams atoms;
    atoms.r = 7.5e-4;
    DriveConfig drive;
    drive.Omega = 0.018;
    drive.delta1 = 1e-3;
    ControlProfile profile{{{1.0, -0.01, 0.0, 0.01}, {1.0, 0.01, 0.0, 0.01}}};

    report("sample_control_profile",
           time_best([&] { sample_control_profile(profile, grid, Exec::Serial); }),
           time_best([&] { sample_control_profile(profile, grid, Exec::Parallel); }));

    const ComplexField2D control = sample_control_profile(profile, grid);
    report("susceptibility_map",
           time_best([&] { susceptibility_map(control, atoms, drive, Exec::Serial); }),
           time_best([&] { susceptibility_map(control, atoms, drive, Exec::Parallel); }));

    const Fft2D fft(grid);
    ComplexField2D buf = control;
    report("fft forward+inverse",
           time_best([&] {
               fft.forward(buf.data(), Exec::Serial);
               fft.inverse(buf.data(), Exec::Serial);
           }),
           time_best([&] {
               fft.forward(buf.data(), Exec::Parallel);
               fft.inverse(buf.data(), Exec::Parallel);
           }));

    report("diffraction_step",
           time_best([&] { diffraction_step(control, atoms.k2(), 25e-4, fft, Exec::Serial); }),
           time_best([&] { diffraction_step(control, atoms.k2(), 25e-4, fft, Exec::Parallel); }));

    const ComplexField2D chi = susceptibility_map(control, atoms, drive);
    report("medium_step",
           time_best([&] { medium_step(control, chi, atoms.k1(), 25e-4, 1e3, Exec::Serial); }),
           time_best([&] { medium_step(control, chi, atoms.k1(), 25e-4, 1e3, Exec::Parallel); }));
}

} // namespace

int main() {
    std::printf("OpenMP max threads: %d\n", omp_get_max_threads());
    bench_grid(TransverseGrid{1024, 1, 0.06, 0.06}, "1D figure grid");
    bench_grid(TransverseGrid{512, 512, 0.06, 0.06}, "2D figure grid");
    return 0;
}
