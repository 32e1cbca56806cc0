#include "ddrsim/atomic.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace ddr {

namespace {

constexpr double pi = std::numbers::pi;

using Matrix16 = Eigen::Matrix<complexd, 16, 16>;
using Vector16 = Eigen::Vector<complexd, 16>;

inline int idx(int i, int j) { return 4 * i + j; }

/// Coherence damping+detuning table, indices 0..3 <-> levels |1>..|4>.
void damping_table(const ComplexRates& g, complexd damp[4][4]) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) damp[i][j] = 0.0;
    damp[1][0] = g.g21;
    damp[1][2] = g.g23;
    damp[1][3] = g.g24;
    damp[2][0] = g.g31;
    damp[2][3] = g.g34;
    damp[3][0] = g.g41;
    damp[0][1] = std::conj(g.g21);
    damp[2][1] = std::conj(g.g23);
    damp[3][1] = std::conj(g.g24);
    damp[0][2] = std::conj(g.g31);
    damp[3][2] = std::conj(g.g34);
    damp[0][3] = std::conj(g.g41);
}

/// Steady-state system matrix: commutator of the field Hamiltonian plus the
/// printed damping/pump structure; the rho44 row is replaced by the trace.
Matrix16 system_matrix(const AtomicParams& p, const DriveConfig& d, complexd g) {
    const complexd i1(0.0, 1.0);
    complexd Vf[4][4] = {};
    Vf[3][0] = -g;
    Vf[0][3] = -std::conj(g);
    Vf[3][2] = -d.G;
    Vf[2][3] = -std::conj(d.G);
    Vf[2][1] = -d.Omega;
    Vf[1][2] = -std::conj(d.Omega);

    const ComplexRates rates = complex_rates(p, d);
    complexd damp[4][4];
    damping_table(rates, damp);

    Matrix16 A = Matrix16::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const int row = idx(i, j);
            for (int k = 0; k < 4; ++k) {
                A(row, idx(k, j)) += -i1 * Vf[i][k];
                A(row, idx(i, k)) += i1 * Vf[k][j];
            }
            if (i != j) A(row, idx(i, j)) -= damp[i][j];
        }
    }
    const double gam = p.gamma;
    A(idx(0, 0), idx(0, 0)) += -p.r;
    A(idx(0, 0), idx(3, 3)) += p.r + gam;
    A(idx(1, 1), idx(3, 3)) += gam;
    A(idx(2, 2), idx(3, 3)) += gam;
    A(idx(3, 3), idx(0, 0)) += p.r;
    A(idx(3, 3), idx(3, 3)) += -(p.r + 3.0 * gam);

    A.row(idx(3, 3)).setZero();
    for (int i = 0; i < 4; ++i) A(idx(3, 3), idx(i, i)) = 1.0;
    return A;
}

DensityMatrix unpack(const Vector16& x) {
    DensityMatrix rho{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho[i][j] = x(idx(i, j));
    return rho;
}

void check_physical(const DensityMatrix& rho) {
    double herm = 0.0, imdiag = 0.0;
    complexd tr = 0.0;
    for (int i = 0; i < 4; ++i) {
        tr += rho[i][i];
        imdiag = std::max(imdiag, std::abs(rho[i][i].imag()));
        for (int j = 0; j < 4; ++j)
            herm = std::max(herm, std::abs(rho[i][j] - std::conj(rho[j][i])));
    }
    if (herm > 1e-6 || imdiag > 1e-6 || std::abs(tr - 1.0) > 1e-6)
        throw SingularSystem("steady-state solve produced an unphysical density matrix "
                             "(ill-conditioned parameter regime)");
}

/// Rank-deficient g=0 corners have a unique continuous-limit branch: everything
/// optically pumps into |1> when r=0, and into the microwave-free sink |2> when
/// r>0 with Omega=0 and G->0. Pinning that population resolves the solve; a
/// small residual confirms the pin is consistent with the equations.
DensityMatrix solve_pinned(const Matrix16& A, const Vector16& b, int level, double value) {
    Eigen::Matrix<complexd, 17, 16> As;
    Eigen::Vector<complexd, 17> bs;
    As.topRows<16>() = A;
    bs.head<16>() = b;
    As.row(16).setZero();
    As(16, idx(level, level)) = 1.0;
    bs(16) = value;
    Vector16 x = As.colPivHouseholderQr().solve(bs);
    if ((As * x - bs).norm() > 1e-8)
        throw SingularSystem("degenerate steady state inconsistent with the limit branch");
    DensityMatrix rho = unpack(x);
    check_physical(rho);
    return rho;
}

DensityMatrix solve_steady_state(const AtomicParams& p, const DriveConfig& d, complexd g) {
    const Matrix16 A = system_matrix(p, d, g);
    Vector16 b = Vector16::Zero();
    b(idx(3, 3)) = 1.0;

    Eigen::FullPivLU<Matrix16> lu(A);
    if (lu.isInvertible()) {
        Vector16 x = lu.solve(b);
        x += lu.solve(b - A * x); // one refinement pass
        DensityMatrix rho = unpack(x);
        check_physical(rho);
        return rho;
    }

    const bool fields_on = std::abs(d.G) > 0.0 || std::abs(d.Omega) > 0.0;
    if (g == complexd{0.0, 0.0}) {
        if (p.r == 0.0 && fields_on) return solve_pinned(A, b, 0, 1.0);
        if (p.r > 0.0 && std::abs(d.Omega) == 0.0) return solve_pinned(A, b, 1, 1.0);
    }
    throw SingularSystem(
        "steady-state linear system is rank-deficient beyond the trace replacement");
}

} // namespace

double AtomicParams::coupling() const {
    if (coupling_C0) return *coupling_C0;
    return 3.0 * density_N * lambda1 * lambda1 * lambda1 / (32.0 * pi * pi * pi);
}

double AtomicParams::k1() const { return 2.0 * pi / lambda1; }
double AtomicParams::k2() const { return 2.0 * pi / lambda2; }

void AtomicParams::validate() const {
    if (!(gamma > 0)) throw std::invalid_argument("atomic.gamma must be > 0");
    if (!(Gamma_c >= 0)) throw std::invalid_argument("atomic.Gamma_c must be >= 0");
    if (!(r >= 0)) throw std::invalid_argument("atomic.r must be >= 0");
    if (!(density_N > 0)) throw std::invalid_argument("atomic.density_N must be > 0");
    if (!(lambda1 > 0) || !(lambda2 > 0))
        throw std::invalid_argument("atomic wavelengths must be > 0");
    if (!(coupling() > 0)) throw std::invalid_argument("atomic.coupling_C0 must be > 0");
}

void DriveConfig::validate() const {
    auto finite = [](complexd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    if (!finite(G) || !finite(Omega) || !std::isfinite(delta1) || !std::isfinite(delta2) ||
        !std::isfinite(delta3))
        throw std::invalid_argument("drive values must be finite");
}

ComplexRates complex_rates(const AtomicParams& p, const DriveConfig& d) {
    const complexd i1(0.0, 1.0);
    const double gam = p.gamma, Gam = p.Gamma_c, r = p.r;
    ComplexRates out;
    out.g21 = r / 2 + Gam - i1 * (d.delta1 - d.delta2 - d.delta3);
    out.g23 = Gam + i1 * d.delta3;
    out.g24 = gam + i1 * (d.delta2 + d.delta3);
    out.g31 = r / 2 + Gam + i1 * (d.delta2 - d.delta1);
    out.g34 = gam + i1 * d.delta2;
    out.g41 = r / 2 + gam - i1 * d.delta1;
    return out;
}

Populations0 zeroth_order_populations(const AtomicParams& p, const DriveConfig& d,
                                      double denom_floor) {
    const double gam = p.gamma, Gam = p.Gamma_c, r = p.r;
    const double d2 = d.delta2, d3 = d.delta3;
    const double u = std::norm(d.G);     // |G|^2
    const double v = std::norm(d.Omega); // |Omega|^2
    const double g2 = gam * gam;
    const double d23 = d2 + d3;

    const double D = r * gam * u * u * u
        + u * u * (2 * r * gam * (Gam * gam - d3 * d23) + (2 * g2 + r * (Gam + 4 * gam)) * v)
        + 4 * r * Gam * v * ((g2 + d2 * d2) * (g2 + d23 * d23) + 2 * (g2 - d2 * d23) * v + v * v)
        + u * (r * gam * (Gam * Gam + d3 * d3) * (g2 + d23 * d23)
               + (gam * (2 * Gam * g2 + r * (Gam + 2 * gam) * (Gam + 2 * gam))
                  + 2 * (Gam * gam + 2 * r * (3 * Gam + gam)) * d2 * d2
                  + 4 * (5 * r * Gam + 2 * r * gam + Gam * gam) * d2 * d3
                  + (8 * r * Gam + 5 * r * gam + 2 * Gam * gam) * d3 * d3) * v
               + 2 * (Gam * gam + 2 * r * (gam + Gam)) * v * v);

    if (std::abs(D) < denom_floor) {
        std::ostringstream msg;
        msg << "closed-form population denominator |D| = " << std::abs(D)
            << " below floor " << denom_floor << " (Omega=0 && r=0 or G-degenerate regime)";
        throw DegenerateParameters(msg.str());
    }

    const double shared = gam * (Gam * gam + u) + Gam * (d23 * d23 + v);
    const double n11 = 2 * (r + gam) * u * v * shared;
    const double n44 = 2 * r * u * v * shared;

    const double n33 = r * v * (2 * Gam * d2 * d2 * d2 * d2 + 4 * Gam * d2 * d2 * d2 * d3
        + d3 * d3 * (2 * Gam * g2 + (2 * Gam + gam) * u)
        + d2 * d2 * (2 * Gam * d3 * d3 + (3 * Gam + 2 * gam) * u + 4 * Gam * (g2 - v))
        + d2 * d3 * ((5 * Gam + 2 * gam) * u + 4 * Gam * (g2 - v))
        + (u + 2 * (g2 + v)) * (gam * u + Gam * (g2 + v)));

    const double n22 = r * (gam * u * u * u
        + u * u * (2 * gam * (Gam * gam - d2 * d3 - d3 * d3) + (Gam - gam) * v)
        + u * (gam * (Gam * Gam + d3 * d3) * (d23 * d23 + g2)
               + (Gam * Gam * gam - Gam * g2 + 2 * gam * g2
                  + (5 * Gam + 2 * gam) * d2 * d2 + (7 * Gam + 6 * gam) * d2 * d3
                  + (2 * Gam + 4 * gam) * d3 * d3) * v
               + (2 * gam - Gam) * v * v)
        + 2 * Gam * v * ((d2 * d2 + g2) * (d23 * d23 + g2) + 2 * (g2 - d2 * d23) * v + v * v));

    Populations0 out;
    out.rho11 = n11 / D;
    out.rho22 = n22 / D;
    out.rho33 = n33 / D;
    out.rho44 = n44 / D;
    out.denom = D;
    return out;
}

DensityMatrix steady_state_oracle(const AtomicParams& p, const DriveConfig& d, complexd g) {
    p.validate();
    d.validate();
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
        throw std::invalid_argument("probe Rabi amplitude g must be finite");
    return solve_steady_state(p, d, g);
}

Populations0 oracle_populations(const AtomicParams& p, const DriveConfig& d) {
    if (p.r == 0.0) {
        if (std::abs(d.G) == 0.0 && std::abs(d.Omega) == 0.0)
            throw SingularSystem("all fields and the pump are zero; populations are undetermined");
        // without the pump nothing leaves |1> at zeroth order and optical pumping
        // empties the rest; this is the exact limit of the closed form
        return Populations0{1.0, 0.0, 0.0, 0.0, 0.0};
    }
    const DensityMatrix rho = solve_steady_state(p, d, complexd{0.0, 0.0});
    Populations0 out;
    out.rho11 = rho[0][0].real();
    out.rho22 = rho[1][1].real();
    out.rho33 = rho[2][2].real();
    out.rho44 = rho[3][3].real();
    out.denom = 0.0;
    return out;
}

complexd rho41_plus(const AtomicParams& p, const DriveConfig& d, const Populations0& pop) {
    const complexd i1(0.0, 1.0);
    const ComplexRates G = complex_rates(p, d);
    const double u = std::norm(d.G);
    const double v = std::norm(d.Omega);

    const complexd B = G.g21 * (G.g23 * G.g24 + u) - G.g23 * v;
    const complexd C = (G.g21 + G.g34) * v;
    const complexd A = (B * (pop.rho44 - pop.rho33) + C * (pop.rho33 - pop.rho22)) /
                       (G.g23 * (G.g24 * G.g34 + v) + G.g34 * u);
    const complexd lam = G.g21 * G.g31 + v;
    return i1 * (lam * (pop.rho11 - pop.rho44) + A * u) / (G.g41 * lam + G.g21 * u);
}

complexd rho41_plus(const AtomicParams& p, const DriveConfig& d) {
    Populations0 pop;
    try {
        pop = zeroth_order_populations(p, d);
    } catch (const DegenerateParameters&) {
        pop = oracle_populations(p, d);
    }
    return rho41_plus(p, d, pop);
}

Susceptibility chi41(const AtomicParams& p, const DriveConfig& d) {
    Susceptibility s;
    s.rho41 = rho41_plus(p, d);
    s.chi = p.coupling() * p.gamma * s.rho41;
    return s;
}

} // namespace ddr
