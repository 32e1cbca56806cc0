// Serial-reference vs OpenMP-parallel kernel equivalence, plus a naive DFT
// oracle for the FFT.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ddrsim/propagate.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

using namespace ddr;

namespace {

ComplexField2D random_field(const TransverseGrid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexField2D f(g);
    for (complexd& v : f.values()) v = complexd{u(rng), u(rng)};
    return f;
}

bool bitwise_equal(const ComplexField2D& a, const ComplexField2D& b) {
    return std::memcmp(a.data(), b.data(), a.grid().size() * sizeof(complexd)) == 0;
}

/// O(n^2) reference transform of one line.
std::vector<complexd> naive_dft(std::span<const complexd> in, int sign) {
    const std::size_t n = in.size();
    std::vector<complexd> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        complexd s = 0;
        for (std::size_t m = 0; m < n; ++m)
            s += in[m] * std::polar(1.0, sign * 2.0 * std::numbers::pi * double(k * m % n) /
                                             double(n));
        out[k] = s;
    }
    return out;
}

} // namespace

TEST_CASE("FFT matches the naive DFT") {
    SUBCASE("1D") {
        const TransverseGrid g{64, 1, 0.06, 0.06};
        const Fft2D fft(g);
        ComplexField2D f = random_field(g, 1);
        const std::vector<complexd> ref =
            naive_dft(std::span<const complexd>(f.values()), -1);
        fft.forward(f.data());
        for (int i = 0; i < g.nx; ++i) CHECK(std::abs(f.at(i, 0) - ref[i]) < 1e-10);
    }
    SUBCASE("2D separates into row and column transforms") {
        const TransverseGrid g{16, 8, 0.06, 0.06};
        const Fft2D fft(g);
        ComplexField2D f = random_field(g, 2);
        // reference: DFT rows then columns
        std::vector<std::vector<complexd>> rows(g.ny);
        for (int j = 0; j < g.ny; ++j) {
            std::vector<complexd> line(g.nx);
            for (int i = 0; i < g.nx; ++i) line[i] = f.at(i, j);
            rows[j] = naive_dft(line, -1);
        }
        std::vector<std::vector<complexd>> ref(g.ny, std::vector<complexd>(g.nx));
        for (int i = 0; i < g.nx; ++i) {
            std::vector<complexd> col(g.ny);
            for (int j = 0; j < g.ny; ++j) col[j] = rows[j][i];
            const std::vector<complexd> t = naive_dft(col, -1);
            for (int j = 0; j < g.ny; ++j) ref[j][i] = t[j];
        }
        fft.forward(f.data());
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) CHECK(std::abs(f.at(i, j) - ref[j][i]) < 1e-10);
    }
    SUBCASE("forward-inverse round trip") {
        const TransverseGrid g{128, 4, 0.06, 0.06};
        const Fft2D fft(g);
        const ComplexField2D f0 = random_field(g, 3);
        ComplexField2D f = f0;
        fft.forward(f.data());
        fft.inverse(f.data());
        for (std::size_t i = 0; i < f.values().size(); ++i)
            CHECK(std::abs(f.values()[i] - f0.values()[i]) < 1e-12);
    }
}

TEST_CASE("serial and parallel kernel paths are bit-identical") {
    const TransverseGrid g1{512, 1, 0.06, 0.06};
    const TransverseGrid g2{64, 64, 0.05, 0.05};
    AtomicParams atoms;
    atoms.r = 5e-4;
    DriveConfig drive;
    drive.Omega = 0.015;
    drive.delta1 = 1e-3;
    const ControlProfile prof{{{1.0, -0.012, 0.0, 0.01}, {1.0, 0.012, 0.0, 0.01}}};

    for (const TransverseGrid& g : {g1, g2}) {
        CAPTURE(g.nx);
        CAPTURE(g.ny);
        const ComplexField2D cs = sample_control_profile(prof, g, Exec::Serial);
        const ComplexField2D cp = sample_control_profile(prof, g, Exec::Parallel);
        CHECK(bitwise_equal(cs, cp));

        CHECK(bitwise_equal(susceptibility_map(cs, atoms, drive, Exec::Serial),
                            susceptibility_map(cs, atoms, drive, Exec::Parallel)));

        const Fft2D fft(g);
        ComplexField2D fs = random_field(g, 7), fp = fs;
        fft.forward(fs.data(), Exec::Serial);
        fft.forward(fp.data(), Exec::Parallel);
        CHECK(bitwise_equal(fs, fp));
        fft.inverse(fs.data(), Exec::Serial);
        fft.inverse(fp.data(), Exec::Parallel);
        CHECK(bitwise_equal(fs, fp));

        const ComplexField2D beam = random_field(g, 8);
        CHECK(bitwise_equal(diffraction_step(beam, atoms.k1(), 0.01, fft, Exec::Serial),
                            diffraction_step(beam, atoms.k1(), 0.01, fft, Exec::Parallel)));

        const ComplexField2D chi = susceptibility_map(cs, atoms, drive);
        CHECK(bitwise_equal(medium_step(beam, chi, atoms.k1(), 0.01, 1e6, Exec::Serial),
                            medium_step(beam, chi, atoms.k1(), 0.01, 1e6, Exec::Parallel)));
    }
}

TEST_CASE("whole propagation runs identically on both execution paths") {
    const TransverseGrid g{256, 1, 0.06, 0.06};
    AtomicParams atoms;
    atoms.r = 7.5e-4;
    DriveConfig drive;
    drive.Omega = 0.018;
    drive.delta1 = 1e-3;
    const ComplexField2D control0 =
        sample_control_profile(ControlProfile{{{1.0, -0.01, 0.0, 0.01}, {1.0, 0.01, 0.0, 0.01}}},
                               g);
    ComplexField2D probe0(g);
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        probe0.at(i, 0) = 0.01 * std::exp(-x * x / (0.025 * 0.025));
    }
    PropagationConfig cfg;
    cfg.dz = 2.5e-3;
    cfg.z_total = 0.05;
    cfg.k1 = atoms.k1();
    cfg.k2 = atoms.k2();

    cfg.exec = Exec::Serial;
    const PropagationRecord rs =
        propagate(probe0, control0, atoms, drive, cfg, std::vector<double>{0.05});
    cfg.exec = Exec::Parallel;
    const PropagationRecord rp =
        propagate(probe0, control0, atoms, drive, cfg, std::vector<double>{0.05});
    REQUIRE(rs.snapshots.size() == rp.snapshots.size());
    for (std::size_t s = 0; s < rs.snapshots.size(); ++s) {
        CHECK(bitwise_equal(rs.snapshots[s].probe, rp.snapshots[s].probe));
        CHECK(bitwise_equal(rs.snapshots[s].control, rp.snapshots[s].control));
    }
}
