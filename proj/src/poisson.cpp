#include "iim/solver.hpp"

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace iim {

namespace {

using ComplexArray = Eigen::ArrayXXcd;

ComplexArray fft2(const Array2D& in) {
    Eigen::FFT<double> fft;
    const int nx = static_cast<int>(in.rows());
    const int ny = static_cast<int>(in.cols());
    ComplexArray mid(nx, ny);
    std::vector<double> col(nx);
    std::vector<std::complex<double>> spec;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) col[i] = in(i, j);
        fft.fwd(spec, col);
        for (int i = 0; i < nx; ++i) mid(i, j) = spec[i];
    }
    ComplexArray out(nx, ny);
    std::vector<std::complex<double>> row(ny), rspec;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) row[j] = mid(i, j);
        fft.fwd(rspec, row);
        for (int j = 0; j < ny; ++j) out(i, j) = rspec[j];
    }
    return out;
}

Array2D ifft2_real(const ComplexArray& in) {
    Eigen::FFT<double> fft;
    const int nx = static_cast<int>(in.rows());
    const int ny = static_cast<int>(in.cols());
    ComplexArray mid(nx, ny);
    std::vector<std::complex<double>> row(ny), rspec;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) row[j] = in(i, j);
        fft.inv(rspec, row);
        for (int j = 0; j < ny; ++j) mid(i, j) = rspec[j];
    }
    Array2D out(nx, ny);
    std::vector<std::complex<double>> col(nx), cspec;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) col[i] = mid(i, j);
        fft.inv(cspec, col);
        for (int i = 0; i < nx; ++i) out(i, j) = cspec[i].real();
    }
    return out;
}

} // namespace

PoissonResult solve_pressure_poisson(const ScalarField& rhs_cells) {
    if (rhs_cells.centering != Centering::cell) {
        throw DomainError("solve_pressure_poisson expects a cell-centered RHS");
    }
    const Grid& g = rhs_cells.grid;
    if (!g.periodic_x || !g.periodic_y) {
        throw ConfigError("pressure Poisson solve requires a periodic grid");
    }

    PoissonResult result;
    result.compat_mean = rhs_cells.values.mean();
    // Correction sums leave an O(h^2)-scale compatibility defect by design;
    // only an anomalous imbalance relative to the RHS scale is worth a log.
    if (std::abs(result.compat_mean) > 1e-3 * (1.0 + rhs_cells.values.abs().maxCoeff())) {
        warn("pressure_poisson: removing RHS mean " + format_double(result.compat_mean));
    }

    const ComplexArray rhat = fft2(rhs_cells.values - result.compat_mean);
    ComplexArray phat(g.nx, g.ny);
    const double h2 = g.h * g.h;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double lam = (2.0 * std::cos(2.0 * M_PI * i / g.nx) - 2.0 +
                                2.0 * std::cos(2.0 * M_PI * j / g.ny) - 2.0) / h2;
            phat(i, j) = (i == 0 && j == 0) ? 0.0 : rhat(i, j) / lam;
        }
    }

    result.p = ScalarField(g, Centering::cell);
    result.p.values = ifft2_real(phat);
    result.p.values -= result.p.values.mean();

    // Direct residual of the discrete system.
    const ScalarField lap = laplacian(result.p);
    const double rnorm = std::sqrt((rhs_cells.values - result.compat_mean).square().sum());
    const double res = std::sqrt(
        (lap.values - (rhs_cells.values - result.compat_mean)).square().sum());
    result.rel_residual = rnorm > 0.0 ? res / rnorm : res;
    if (result.rel_residual > 1e-10 && rnorm > 1e-14) {
        throw StepError("pressure_poisson: relative residual " +
                        format_double(result.rel_residual) + " exceeds 1e-10");
    }
    return result;
}

double kinetic_energy(const VectorFieldMAC& u) {
    const Grid& g = u.grid;
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) e += sqr(u.read_u(i, j));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) e += sqr(u.read_v(i, j));
    return 0.5 * e * g.h * g.h;
}

} // namespace iim
