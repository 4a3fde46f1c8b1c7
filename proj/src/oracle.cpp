#include "iim/oracle.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <limits>

#include <unsupported/Eigen/FFT>

namespace iim {

MarkerCurve MarkerCurve::from_shape(const InterfaceShape& shape, int n) {
    if (n < 64) throw ConfigError("marker curve needs N >= 64");
    MarkerCurve mc;
    mc.positions = sample_shape(shape, n);
    mc.chi_ref = marker_stretch(mc);
    return mc;
}

bool needs_resample(const MarkerCurve& mc) {
    const int n = mc.size();
    double lo = std::numeric_limits<double>::max(), hi = 0.0;
    for (int k = 0; k < n; ++k) {
        const double d = (mc.positions[(k + 1) % n] - mc.positions[k]).norm();
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return hi > 4.0 * lo;
}

MarkerCurve advect_markers(const MarkerCurve& mc, const AnalyticVelocity& vel,
                           double t, double dt) {
    MarkerCurve out = mc;
    for (Vec2& x : out.positions) {
        const Vec2 k1 = vel(x, t);
        const Vec2 k2 = vel(x + 0.5 * dt * k1, t + 0.5 * dt);
        const Vec2 k3 = vel(x + 0.5 * dt * k2, t + 0.5 * dt);
        const Vec2 k4 = vel(x + dt * k3, t + dt);
        x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return out;
}

MarkerCurve advect_markers(const MarkerCurve& mc, const VectorFieldMAC& vel,
                           double dt) {
    const Grid& g = vel.grid;
    auto sample = [&](const Vec2& x) -> Vec2 {
        return interp_bilinear(vel, g.wrap_point(x));
    };
    MarkerCurve out = mc;
    for (Vec2& x : out.positions) {
        const Vec2 k1 = sample(x);
        const Vec2 k2 = sample(x + 0.5 * dt * k1);
        const Vec2 k3 = sample(x + 0.5 * dt * k2);
        const Vec2 k4 = sample(x + dt * k3);
        x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!g.periodic_x && (x.x() < g.origin.x() || x.x() > g.origin.x() + g.extent.x())) {
            throw DomainError("advect_markers: marker left the domain on a non-periodic axis");
        }
        if (!g.periodic_y && (x.y() < g.origin.y() || x.y() > g.origin.y() + g.extent.y())) {
            throw DomainError("advect_markers: marker left the domain on a non-periodic axis");
        }
    }
    return out;
}

namespace {

// Spectral d/dxi of a periodic sample vector (2 pi period).
std::vector<double> spectral_derivative(const std::vector<double>& f) {
    const int n = static_cast<int>(f.size());
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, f);
    for (int k = 0; k < n; ++k) {
        const int wave = k <= n / 2 ? k : k - n;
        if (2 * k == n) {
            spec[k] = 0.0; // Nyquist mode has no well-defined derivative sign
        } else {
            spec[k] *= std::complex<double>(0.0, wave);
        }
    }
    std::vector<double> out;
    fft.inv(out, spec);
    return out;
}

} // namespace

std::vector<double> marker_stretch(const MarkerCurve& mc) {
    const int n = mc.size();
    if (n < 64) throw ConfigError("marker_stretch: N >= 64 required");
    std::vector<double> xs(n), ys(n);
    for (int k = 0; k < n; ++k) {
        xs[k] = mc.positions[k].x();
        ys[k] = mc.positions[k].y();
    }
    const auto dx = spectral_derivative(xs);
    const auto dy = spectral_derivative(ys);
    std::vector<double> chi(n);
    for (int k = 0; k < n; ++k) chi[k] = std::hypot(dx[k], dy[k]);
    return chi;
}

double marker_energy(const MarkerCurve& mc, const std::vector<double>& chi_ref,
                     const EnergyModel& model) {
    const int n = mc.size();
    const double dxi = 2.0 * M_PI / n;
    const auto chi = marker_stretch(mc);
    double e = 0.0;
    for (int k = 0; k < n; ++k) {
        const double ref = chi_ref.empty() ? 1.0 : chi_ref[k];
        e += model.es(chi[k] / ref) * ref * dxi;
    }
    return e;
}

OracleReport compare_eulerian(const MarkerCurve& mc, const LevelSet& ls,
                              const StretchField& chi) {
    OracleReport rep;
    const auto poly = extract_interface(ls);
    rep.hausdorff = hausdorff_distance(poly, mc.positions);

    const auto mchi = marker_stretch(mc);
    const int n = mc.size();
    for (const Vec2& p : poly) {
        // Project onto the marker polyline and interpolate the reference
        // stretch along the segment, so the pairing error is O(spacing^2).
        int best = 0;
        double bd = std::numeric_limits<double>::max();
        double bt = 0.0;
        for (int k = 0; k < n; ++k) {
            const Vec2& a = mc.positions[k];
            const Vec2& b = mc.positions[(k + 1) % n];
            const Vec2 d = b - a;
            const double len2 = d.squaredNorm();
            const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
            const double dist = (p - (a + t * d)).squaredNorm();
            if (dist < bd) {
                bd = dist;
                best = k;
                bt = t;
            }
        }
        const int next = (best + 1) % n;
        const double want = (1.0 - bt) * mchi[best] / mc.chi_ref[best] +
                            bt * mchi[next] / mc.chi_ref[next];
        const double got = interp_bilinear(chi.chi, p);
        rep.max_rel_stretch_err =
            std::max(rep.max_rel_stretch_err, std::abs(got - want) / std::abs(want));
    }
    return rep;
}

void write_marker_csv(const std::string& path, const MarkerCurve& mc) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "'");
    os << "xi,x,y,chi\n";
    const auto chi = marker_stretch(mc);
    const int n = mc.size();
    for (int k = 0; k < n; ++k) {
        os << format_double(2.0 * M_PI * k / n) << ","
           << format_double(mc.positions[k].x()) << ","
           << format_double(mc.positions[k].y()) << ","
           << format_double(chi[k]) << "\n";
    }
}

} // namespace iim
