#include "iim/jumps.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace iim {

double jump_pressure(const GeoPoint& geo) { return geo.f2; }

Mat2 jump_grad_u(const GeoPoint& geo, double Re) {
    if (std::abs(geo.f1.dot(geo.n)) > 1e-10 * std::max(1.0, geo.f1.norm())) {
        throw DomainError("jump_grad_u: f1 is not orthogonal to n");
    }
    return -Re * geo.n * geo.f1.transpose();
}

namespace {

double surface_divergence_f1(const GeoPoint& geo) {
    const Mat2 proj = Mat2::Identity() - geo.n * geo.n.transpose();
    return (proj.array() * geo.grad_f1.array()).sum();
}

} // namespace

Vec2 jump_grad_p(const GeoPoint& geo) {
    const Vec2& n = geo.n;
    const Vec2 tangential = geo.grad_f2 - n * n.dot(geo.grad_f2);
    return tangential + n * surface_divergence_f1(geo);
}

std::array<Mat2, 2> jump_hess_u(const GeoPoint& geo, double Re) {
    const Vec2& n = geo.n;
    const Vec2 gp = jump_grad_p(geo);
    std::array<Mat2, 2> out{Mat2::Zero(), Mat2::Zero()};
    for (int m = 0; m < 2; ++m) {
        Mat2 h;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double delta_ij = i == j ? 1.0 : 0.0;
                double ndf = 0.0; // n_k d_k (f1)_m
                for (int k = 0; k < 2; ++k) ndf += n[k] * geo.grad_f1(k, m);
                h(i, j) = geo.kappa * (delta_ij - 2.0 * n[i] * n[j]) * geo.f1[m] -
                          (n[j] * geo.grad_f1(i, m) + n[i] * geo.grad_f1(j, m) -
                           2.0 * n[i] * n[j] * ndf) +
                          n[i] * n[j] * gp[m];
            }
        }
        out[m] = Re * h;
    }
    return out;
}

Mat2 jump_hess_p(const GeoPoint& geo, double bulk_velocity_jump_term) {
    const Vec2& n = geo.n;
    const double lap_f2 = geo.hess_f2.trace();
    Mat2 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double delta_ij = i == j ? 1.0 : 0.0;
            const double ndg = n.dot(geo.grad_g);
            out(i, j) = n[i] * n[j] * bulk_velocity_jump_term + geo.hess_f2(i, j) -
                        n[i] * n[j] * lap_f2 -
                        geo.kappa * (delta_ij - 2.0 * n[i] * n[j]) * geo.g +
                        (n[j] * geo.grad_g[i] + n[i] * geo.grad_g[j] -
                         2.0 * n[i] * n[j] * ndg);
        }
    }
    return out;
}

Vec2 jump_u_t(const GeoPoint&, const Vec2& u_at_point, const Mat2& jgu) {
    // (u.[grad u])_j = u_i [d_i u_j]
    return -(jgu.transpose() * u_at_point);
}

double temporal_jump(double spatial_jump, double u_dot_n) {
    if (std::abs(u_dot_n) < 1e-12) {
        warn("temporal_jump: |u.n| < 1e-12, crossing direction undefined");
        return 0.0;
    }
    return u_dot_n < 0.0 ? spatial_jump : -spatial_jump;
}

JumpPoint evaluate_jumps(const GeoPoint& geo, double Re,
                         double bulk_velocity_jump_term, const Vec2& u_at_point) {
    JumpPoint jp;
    jp.pos = geo.pos;
    jp.n = geo.n;
    jp.t = geo.t;
    jp.jump_p = jump_pressure(geo);
    jp.jump_grad_u = jump_grad_u(geo, Re);
    jp.jump_grad_p = jump_grad_p(geo);
    jp.jump_hess_u = jump_hess_u(geo, Re);
    jp.jump_hess_p = jump_hess_p(geo, bulk_velocity_jump_term);
    jp.jump_u_t = jump_u_t(geo, u_at_point, jp.jump_grad_u);
    return jp;
}

namespace {

// Spectral helpers on 2 pi periodic samples.
struct Spectral {
    Eigen::FFT<double> fft;

    std::vector<std::complex<double>> modes(const std::vector<double>& f) {
        std::vector<std::complex<double>> spec;
        fft.fwd(spec, f);
        return spec;
    }
    std::vector<double> inverse(std::vector<std::complex<double>> spec) {
        std::vector<double> out;
        fft.inv(out, spec);
        return out;
    }
    // Zero every mode with |wave| > keep.
    void lowpass(std::vector<std::complex<double>>& spec, int keep) {
        const int n = static_cast<int>(spec.size());
        for (int k = 0; k < n; ++k) {
            const int wave = k <= n / 2 ? k : k - n;
            if (std::abs(wave) > keep) spec[k] = 0.0;
        }
    }
    std::vector<std::complex<double>> derivative(const std::vector<std::complex<double>>& spec) {
        const int n = static_cast<int>(spec.size());
        auto out = spec;
        for (int k = 0; k < n; ++k) {
            const int wave = k <= n / 2 ? k : k - n;
            out[k] *= std::complex<double>(0.0, 2 * k == n ? 0.0 : wave);
        }
        return out;
    }
};

std::vector<Vec2> resample_uniform_arclength(const std::vector<Vec2>& poly, int n) {
    const int m = static_cast<int>(poly.size());
    std::vector<double> s(m + 1, 0.0);
    for (int k = 0; k < m; ++k) s[k + 1] = s[k] + (poly[(k + 1) % m] - poly[k]).norm();
    const double total = s[m];
    std::vector<Vec2> out;
    out.reserve(n);
    int seg = 0;
    for (int k = 0; k < n; ++k) {
        const double target = total * k / n;
        while (seg + 1 <= m && s[seg + 1] < target) ++seg;
        const double f = (target - s[seg]) / std::max(s[seg + 1] - s[seg], 1e-300);
        out.push_back((1 - f) * poly[seg % m] + f * poly[(seg + 1) % m]);
    }
    return out;
}

} // namespace

GeoData build_geodata(const LevelSet& ls, const StretchField& chi,
                      const EnergyModel& model) {
    const auto poly = refine_polyline_quadratic(extract_interface_refined(ls), 4);

    // Uniform arclength resampling, low-pass smoothing of the curve and of
    // the on-curve scalars, then spectral arclength derivatives.
    int npts = 64;
    while (npts < static_cast<int>(poly.size()) / 2) npts *= 2;
    const auto pts = resample_uniform_arclength(poly, npts);
    const double total_len = polyline_length(poly);
    // Vertex positions carry O(h^2) jitter that spectral differentiation
    // amplifies by m^2..m^3; the retained band grows slowly under refinement
    // so smooth geometry converges while the jitter stays filtered.
    const int keep = std::max(8, static_cast<int>(std::sqrt(double(npts)) / 2.0));

    Spectral sp;
    std::vector<double> xs(npts), ys(npts), chis(npts);
    for (int k = 0; k < npts; ++k) {
        xs[k] = pts[k].x();
        ys[k] = pts[k].y();
        chis[k] = interp_bicubic(chi.chi, pts[k]);
    }
    // d/d(arclength) = (2 pi / L) d/d(sample angle)
    const double scale = 2.0 * M_PI / total_len;

    auto smooth_derivs = [&](std::vector<double>& f, std::vector<double>& f1,
                             std::vector<double>& f2d) {
        auto spec = sp.modes(f);
        sp.lowpass(spec, keep);
        f = sp.inverse(spec);
        auto d1 = sp.derivative(spec);
        f1 = sp.inverse(d1);
        auto d2 = sp.derivative(d1);
        f2d = sp.inverse(d2);
        for (int k = 0; k < npts; ++k) {
            f1[k] *= scale;
            f2d[k] *= scale * scale;
        }
    };

    std::vector<double> x1, x2, y1, y2, chi1, chi2;
    smooth_derivs(xs, x1, x2);
    smooth_derivs(ys, y1, y2);
    smooth_derivs(chis, chi1, chi2);

    // Geometry from the curve: t = (x', y'), kappa from the cross product,
    // signed so a convex inside-positive interface has kappa > 0.
    std::vector<double> kap(npts), kap1(npts), kap2(npts);
    std::vector<Vec2> tangent(npts), normal_v(npts);
    for (int k = 0; k < npts; ++k) {
        Vec2 t(x1[k], y1[k]);
        const double tn = t.norm();
        t /= tn;
        tangent[k] = t;
        // Extraction orients the curve with phi > 0 on the left, so the
        // inward (phi > 0) normal is rot90(t).
        normal_v[k] = Vec2(-t.y(), t.x());
        const double cross = x1[k] * y2[k] - y1[k] * x2[k];
        kap[k] = cross / (tn * tn * tn);
    }
    {
        auto spec = sp.modes(kap);
        sp.lowpass(spec, keep);
        kap = sp.inverse(spec);
        auto d1 = sp.derivative(spec);
        kap1 = sp.inverse(d1);
        auto d2 = sp.derivative(d1);
        kap2 = sp.inverse(d2);
        for (int k = 0; k < npts; ++k) {
            kap1[k] *= scale;
            kap2[k] *= scale * scale;
        }
    }

    // Force densities on the curve.  The surface Laplacian of a curve scalar
    // is its second arclength derivative, and the projected grad(n)
    // contraction reduces to kappa^2 in 2D.
    std::vector<double> es_d(npts), f2v(npts);
    for (int k = 0; k < npts; ++k) es_d[k] = model.es_d(chis[k]);
    std::vector<double> esd1(npts), esd2(npts);
    {
        auto spec = sp.modes(es_d);
        sp.lowpass(spec, keep);
        es_d = sp.inverse(spec);
        auto d1 = sp.derivative(spec);
        esd1 = sp.inverse(d1);
        auto d2 = sp.derivative(d1);
        esd2 = sp.inverse(d2);
        for (int k = 0; k < npts; ++k) {
            esd1[k] *= scale;
            esd2[k] *= scale * scale;
        }
    }
    std::vector<double> ebp(npts), ebp1(npts), ebp2(npts);
    for (int k = 0; k < npts; ++k) ebp[k] = model.eb_d(kap[k]);
    {
        auto spec = sp.modes(ebp);
        sp.lowpass(spec, keep);
        ebp = sp.inverse(spec);
        auto d1 = sp.derivative(spec);
        ebp1 = sp.inverse(d1);
        auto d2 = sp.derivative(d1);
        ebp2 = sp.inverse(d2);
        for (int k = 0; k < npts; ++k) {
            ebp1[k] *= scale;
            ebp2[k] *= scale * scale;
        }
    }
    std::vector<double> f2s1(npts), f2s2(npts);
    for (int k = 0; k < npts; ++k) {
        f2v[k] = kap[k] * es_d[k] + model.eb(kap[k]) * kap[k] -
                 model.eb_d(kap[k]) * kap[k] * kap[k] - ebp2[k];
    }
    {
        auto spec = sp.modes(f2v);
        sp.lowpass(spec, keep);
        f2v = sp.inverse(spec);
        auto d1 = sp.derivative(spec);
        f2s1 = sp.inverse(d1);
        auto d2 = sp.derivative(d1);
        f2s2 = sp.inverse(d2);
        for (int k = 0; k < npts; ++k) {
            f2s1[k] *= scale;
            f2s2[k] *= scale * scale;
        }
    }
    // g = surf_div(f1) - n.grad(f2) = F' with the ray-constant extension.
    std::vector<double> gv = esd2, g1(npts);
    {
        auto spec = sp.modes(gv);
        auto d1 = sp.derivative(spec);
        g1 = sp.inverse(d1);
        for (int k = 0; k < npts; ++k) g1[k] *= scale;
    }

    GeoData out;
    out.reserve(npts);
    for (int k = 0; k < npts; ++k) {
        GeoPoint gp;
        gp.pos = Vec2(xs[k], ys[k]);
        gp.n = normal_v[k];
        gp.t = Vec2(-gp.n.y(), gp.n.x());
        gp.kappa = kap[k];
        const Vec2 t = tangent[k];
        const Vec2& nn = normal_v[k];
        // f1 = F t with F = d/ds E_s'(chi); componentwise ray-constant
        // extension gives d_i (f1)_j = t_i (F' t_j + kappa F n_j).
        const double F = esd1[k], F1 = esd2[k];
        gp.f1 = F * t;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                gp.grad_f1(i, j) = t[i] * (F1 * t[j] + kap[k] * F * nn[j]);
        gp.f2 = f2v[k];
        gp.grad_f2 = f2s1[k] * t;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                gp.hess_f2(i, j) = f2s2[k] * t[i] * t[j] +
                                   kap[k] * f2s1[k] * (nn[i] * t[j] + t[i] * nn[j]);
        gp.g = F1;
        gp.grad_g = g1[k] * t;
        out.push_back(gp);
    }
    return out;
}

GeoData build_geodata_band(const LevelSet& ls, const StretchField& chi,
                           const EnergyModel& model) {
    const Grid& g = ls.grid();
    const auto poly = extract_interface(ls);
    const NormalField nf = normal(ls);
    const CurvatureField kap = curvature(ls);

    VectorNodeField f1 = compute_f1(ls, chi, model);
    ScalarField f2 = compute_f2(ls, chi, model);

    // Normal extension before differentiating, so Cartesian derivatives on
    // the band encode surface derivatives.
    f1.x = extend_scalar(ls, f1.x);
    f1.y = extend_scalar(ls, f1.y);
    f2 = extend_scalar(ls, f2);

    const auto df1x = gradient_central(f1.x);
    const auto df1y = gradient_central(f1.y);
    const auto df2 = gradient_central(f2);

    TensorNodeField grad_f1(g);
    VectorNodeField grad_f2(g);
    ScalarField gfield(g, Centering::node);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            Mat2 m;
            m(0, 0) = df1x[0].at(i, j); // d_x f1_x
            m(0, 1) = df1y[0].at(i, j); // d_x f1_y
            m(1, 0) = df1x[1].at(i, j); // d_y f1_x
            m(1, 1) = df1y[1].at(i, j); // d_y f1_y
            grad_f1.set(i, j, m);
            grad_f2.set(i, j, {df2[0].at(i, j), df2[1].at(i, j)});
            const Vec2 n = nf.at(i, j);
            const Mat2 proj = Mat2::Identity() - n * n.transpose();
            gfield.at(i, j) = (proj.array() * m.array()).sum() -
                              n.dot(Vec2(df2[0].at(i, j), df2[1].at(i, j)));
        }
    }
    gfield = extend_scalar(ls, gfield);
    const auto dg = gradient_central(gfield);
    const auto df2x = gradient_central(grad_f2.x);
    const auto df2y = gradient_central(grad_f2.y);

    GeoData out;
    out.reserve(poly.size());
    for (const Vec2& p : poly) {
        GeoPoint gp;
        gp.pos = p;
        Vec2 n = interp_bilinear(nf.n, p);
        n.normalize();
        gp.n = n;
        gp.t = Vec2(-n.y(), n.x());
        gp.kappa = interp_bilinear(kap, p);
        gp.f1 = interp_bilinear(f1, p);
        // Exact orthogonality by construction (interpolation reintroduces a
        // small normal component; project it out).
        gp.f1 -= n * n.dot(gp.f1);
        gp.grad_f1 = interp_bilinear(grad_f1, p);
        gp.f2 = interp_bilinear(f2, p);
        gp.grad_f2 = interp_bilinear(grad_f2, p);
        Mat2 h;
        h(0, 0) = interp_bilinear(df2x[0], p);
        h(0, 1) = 0.5 * (interp_bilinear(df2x[1], p) + interp_bilinear(df2y[0], p));
        h(1, 0) = h(0, 1);
        h(1, 1) = interp_bilinear(df2y[1], p);
        gp.hess_f2 = h;
        gp.g = interp_bilinear(gfield, p);
        gp.grad_g = {interp_bilinear(dg[0], p), interp_bilinear(dg[1], p)};
        out.push_back(gp);
    }
    return out;
}

JumpSet evaluate_jumps(const GeoData& geo, double Re, const VectorFieldMAC* u) {
    JumpSet js;
    js.points.reserve(geo.size());
    for (const GeoPoint& gp : geo) {
        Vec2 uval = Vec2::Zero();
        if (u) uval = interp_bilinear(*u, gp.pos);
        // The bulk velocity-product term needs one-sided gradients; it is
        // assembled by the solver where one-sided data is available.  Zero is
        // exact whenever u is smooth (e.g. at rest or for validation states).
        js.points.push_back(evaluate_jumps(gp, Re, 0.0, uval));
    }
    return js;
}

namespace {

void accumulate(JumpPoint& acc, const JumpPoint& p, double w) {
    acc.pos += w * p.pos;
    acc.n += w * p.n;
    acc.jump_p += w * p.jump_p;
    acc.jump_grad_u += w * p.jump_grad_u;
    acc.jump_grad_p += w * p.jump_grad_p;
    acc.jump_hess_u[0] += w * p.jump_hess_u[0];
    acc.jump_hess_u[1] += w * p.jump_hess_u[1];
    acc.jump_hess_p += w * p.jump_hess_p;
    acc.jump_u_t += w * p.jump_u_t;
}

} // namespace

JumpPoint interpolate_jumps(const JumpSet& js, const Vec2& x) {
    const auto& pts = js.points;
    const int n = static_cast<int>(pts.size());
    if (n == 0) throw DomainError("interpolate_jumps: empty jump set");
    int best_k = 0;
    double best_d = std::numeric_limits<double>::max();
    double best_t = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec2& a = pts[k].pos;
        const Vec2& b = pts[(k + 1) % n].pos;
        const Vec2 d = b - a;
        const double len2 = d.squaredNorm();
        const double t = len2 > 0.0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
        const double dist = (x - (a + t * d)).squaredNorm();
        if (dist < best_d) {
            best_d = dist;
            best_k = k;
            best_t = t;
        }
    }
    // Local quadratic interpolation in arclength; linear interpolation leaves
    // an O(s^2) data error that the 1/h^2 stencil weights amplify to O(1)
    // truncation at interface-adjacent cells.  Degenerate spans fall back to
    // the linear blend.
    const int k0 = best_t < 0.5 ? (best_k - 1 + n) % n : best_k;
    const int k1 = (k0 + 1) % n;
    const int k2 = (k0 + 2) % n;
    const double s0 = -(pts[k1].pos - pts[k0].pos).norm();
    const double s1 = 0.0;
    const double s2 = (pts[k2].pos - pts[k1].pos).norm();
    const double span = std::max(-s0, s2);
    if (n < 3 || span == 0.0 || -s0 < 0.05 * span || s2 < 0.05 * span) {
        JumpPoint out;
        accumulate(out, pts[best_k], 1.0 - best_t);
        accumulate(out, pts[(best_k + 1) % n], best_t);
        out.n.normalize();
        out.t = Vec2(-out.n.y(), out.n.x());
        return out;
    }
    // Arclength coordinate of the query measured from k1.
    const double sq = best_t < 0.5 ? best_t * s2 : (1.0 - best_t) * s0;
    const double w0 = (sq - s1) * (sq - s2) / ((s0 - s1) * (s0 - s2));
    const double w1 = (sq - s0) * (sq - s2) / ((s1 - s0) * (s1 - s2));
    const double w2 = (sq - s0) * (sq - s1) / ((s2 - s0) * (s2 - s1));

    JumpPoint out;
    accumulate(out, pts[k0], w0);
    accumulate(out, pts[k1], w1);
    accumulate(out, pts[k2], w2);
    out.n.normalize();
    out.t = Vec2(-out.n.y(), out.n.x());
    return out;
}

void write_jumps_csv(const std::string& path, const JumpSet& js) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "'");
    // Tensors flattened row-major: m(0,0), m(0,1), m(1,0), m(1,1).
    os << "x,y,nx,ny,jump_p,"
          "jgu_xx,jgu_xy,jgu_yx,jgu_yy,"
          "jgp_x,jgp_y,"
          "jhu_u_xx,jhu_u_xy,jhu_u_yx,jhu_u_yy,"
          "jhu_v_xx,jhu_v_xy,jhu_v_yx,jhu_v_yy,"
          "jhp_xx,jhp_xy,jhp_yx,jhp_yy,"
          "jut_x,jut_y\n";
    for (const JumpPoint& p : js.points) {
        auto mat = [&](const Mat2& m) {
            return format_double(m(0, 0)) + "," + format_double(m(0, 1)) + "," +
                   format_double(m(1, 0)) + "," + format_double(m(1, 1));
        };
        os << format_double(p.pos.x()) << "," << format_double(p.pos.y()) << ","
           << format_double(p.n.x()) << "," << format_double(p.n.y()) << ","
           << format_double(p.jump_p) << "," << mat(p.jump_grad_u) << ","
           << format_double(p.jump_grad_p.x()) << "," << format_double(p.jump_grad_p.y()) << ","
           << mat(p.jump_hess_u[0]) << "," << mat(p.jump_hess_u[1]) << ","
           << mat(p.jump_hess_p) << ","
           << format_double(p.jump_u_t.x()) << "," << format_double(p.jump_u_t.y()) << "\n";
    }
}

} // namespace iim
