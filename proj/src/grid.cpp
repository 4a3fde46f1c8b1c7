#include "iim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace iim {

const char* to_string(Centering c) {
    return c == Centering::node ? "node" : "cell";
}

Centering centering_from_string(const std::string& s) {
    if (s == "node") return Centering::node;
    if (s == "cell") return Centering::cell;
    throw IoError("unknown centering '" + s + "'");
}

Grid::Grid(Vec2 origin_, Vec2 extent_, int nx_, int ny_, bool periodic_x_,
           bool periodic_y_)
    : origin(origin_),
      extent(extent_),
      nx(nx_),
      ny(ny_),
      periodic_x(periodic_x_),
      periodic_y(periodic_y_) {
    if (nx < 8 || ny < 8) {
        throw ConfigError("grid must have nx, ny >= 8");
    }
    const double hx = extent.x() / nx;
    const double hy = extent.y() / ny;
    if (hx != hy) {
        throw ConfigError("grid cells must be square: extent_x/nx != extent_y/ny");
    }
    h = hx;
}

Vec2 Grid::wrap_point(const Vec2& x) const {
    Vec2 r = x;
    if (periodic_x) {
        r.x() = origin.x() + std::fmod(r.x() - origin.x(), extent.x());
        if (r.x() < origin.x()) r.x() += extent.x();
    }
    if (periodic_y) {
        r.y() = origin.y() + std::fmod(r.y() - origin.y(), extent.y());
        if (r.y() < origin.y()) r.y() += extent.y();
    }
    return r;
}

bool Grid::operator==(const Grid& o) const {
    return origin == o.origin && extent == o.extent && nx == o.nx &&
           ny == o.ny && periodic_x == o.periodic_x && periodic_y == o.periodic_y;
}

ScalarField::ScalarField(const Grid& g, Centering c, double fill)
    : grid(g), centering(c) {
    if (c == Centering::node) {
        values = Array2D::Constant(g.nx + 1, g.ny + 1, fill);
    } else {
        values = Array2D::Constant(g.nx, g.ny, fill);
    }
}

void ScalarField::sync_periodic_edges() {
    if (centering != Centering::node) return;
    if (grid.periodic_x) values.row(grid.nx) = values.row(0);
    if (grid.periodic_y) values.col(grid.ny) = values.col(0);
    if (grid.periodic_x && grid.periodic_y) {
        values(grid.nx, grid.ny) = values(0, 0);
    }
}

VectorFieldMAC::VectorFieldMAC(const Grid& g, double fill) : grid(g) {
    u = Array2D::Constant(g.nx + 1, g.ny, fill);
    v = Array2D::Constant(g.nx, g.ny + 1, fill);
}

double VectorFieldMAC::max_abs() const {
    return std::max(u.abs().maxCoeff(), v.abs().maxCoeff());
}

void VectorFieldMAC::sync_periodic_edges() {
    if (grid.periodic_x) u.row(grid.nx) = u.row(0);
    if (grid.periodic_y) v.col(grid.ny) = v.col(0);
}

namespace {

void require_finite(const ScalarField& f, const char* op) {
    if (!f.all_finite()) {
        throw DomainError(std::string(op) + ": field has non-finite values");
    }
}

// One-dimensional second-order first derivative along one axis of a field,
// with one-sided closures at non-periodic ends.
double d1(const ScalarField& f, int i, int j, int axis, bool periodic, int n,
          double h) {
    const int k = axis == 0 ? i : j;
    auto val = [&](int kk) {
        return axis == 0 ? f.read(kk, j) : f.read(i, kk);
    };
    const int last = f.centering == Centering::node ? n : n - 1;
    if (periodic || (k > 0 && k < last)) {
        return (val(k + 1) - val(k - 1)) / (2.0 * h);
    }
    if (k == 0) {
        return (-3.0 * val(0) + 4.0 * val(1) - val(2)) / (2.0 * h);
    }
    return (3.0 * val(last) - 4.0 * val(last - 1) + val(last - 2)) / (2.0 * h);
}

double d2(const ScalarField& f, int i, int j, int axis, bool periodic, int n,
          double h) {
    const int k = axis == 0 ? i : j;
    auto val = [&](int kk) {
        return axis == 0 ? f.read(kk, j) : f.read(i, kk);
    };
    const int last = f.centering == Centering::node ? n : n - 1;
    if (periodic || (k > 0 && k < last)) {
        return (val(k + 1) - 2.0 * val(k) + val(k - 1)) / (h * h);
    }
    if (k == 0) {
        return (2.0 * val(0) - 5.0 * val(1) + 4.0 * val(2) - val(3)) / (h * h);
    }
    return (2.0 * val(last) - 5.0 * val(last - 1) + 4.0 * val(last - 2) -
            val(last - 3)) /
           (h * h);
}

} // namespace

std::array<ScalarField, 2> gradient_central(const ScalarField& f) {
    require_finite(f, "gradient_central");
    const Grid& g = f.grid;
    ScalarField fx(g, f.centering), fy(g, f.centering);
    for (int j = 0; j < f.size_y(); ++j) {
        for (int i = 0; i < f.size_x(); ++i) {
            fx.at(i, j) = d1(f, i, j, 0, g.periodic_x, g.nx, g.h);
            fy.at(i, j) = d1(f, i, j, 1, g.periodic_y, g.ny, g.h);
        }
    }
    return {fx, fy};
}

ScalarField laplacian(const ScalarField& f) {
    require_finite(f, "laplacian");
    const Grid& g = f.grid;
    ScalarField out(g, f.centering);
    for (int j = 0; j < f.size_y(); ++j) {
        for (int i = 0; i < f.size_x(); ++i) {
            out.at(i, j) = d2(f, i, j, 0, g.periodic_x, g.nx, g.h) +
                           d2(f, i, j, 1, g.periodic_y, g.ny, g.h);
        }
    }
    return out;
}

ScalarField divergence_mac(const VectorFieldMAC& w) {
    if (!w.all_finite()) {
        throw DomainError("divergence_mac: field has non-finite values");
    }
    const Grid& g = w.grid;
    ScalarField out(g, Centering::cell);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            out.at(i, j) = (w.read_u(i + 1, j) - w.read_u(i, j)) / g.h +
                           (w.read_v(i, j + 1) - w.read_v(i, j)) / g.h;
        }
    }
    return out;
}

VectorFieldMAC gradient_faces(const ScalarField& cell_field) {
    if (cell_field.centering != Centering::cell) {
        throw DomainError("gradient_faces expects a cell-centered field");
    }
    const Grid& g = cell_field.grid;
    if (!g.periodic_x || !g.periodic_y) {
        throw DomainError("gradient_faces is defined on periodic grids only");
    }
    VectorFieldMAC out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            out.u(i, j) =
                (cell_field.read(i, j) - cell_field.read(i - 1, j)) / g.h;
        }
    }
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            out.v(i, j) =
                (cell_field.read(i, j) - cell_field.read(i, j - 1)) / g.h;
        }
    }
    return out;
}

namespace {

// Bilinear interpolation on a rectilinear lattice whose sample (i,j) sits at
// lattice_origin + (i,j)*h, with ni x nj unique samples per axis when
// periodic, ni+1 (resp nj+1) when not.
double interp_lattice(const Grid& g, const Vec2& lattice_origin, int ni,
                      int nj, bool node_like_x, bool node_like_y,
                      const std::function<double(int, int)>& sample,
                      const Vec2& xq) {
    Vec2 x = xq;
    if (g.periodic_x) {
        x.x() = lattice_origin.x() +
                std::fmod(x.x() - lattice_origin.x(), g.extent.x());
        if (x.x() < lattice_origin.x()) x.x() += g.extent.x();
    }
    if (g.periodic_y) {
        x.y() = lattice_origin.y() +
                std::fmod(x.y() - lattice_origin.y(), g.extent.y());
        if (x.y() < lattice_origin.y()) x.y() += g.extent.y();
    }
    double rx = (x.x() - lattice_origin.x()) / g.h;
    double ry = (x.y() - lattice_origin.y()) / g.h;
    if (!g.periodic_x) {
        const double max_r = node_like_x ? ni : ni - 1;
        if (rx < -1e-12 || rx > max_r + 1e-12) {
            throw DomainError("interp_bilinear: point outside non-periodic axis x");
        }
        rx = std::clamp(rx, 0.0, max_r - 1e-15);
    }
    if (!g.periodic_y) {
        const double max_r = node_like_y ? nj : nj - 1;
        if (ry < -1e-12 || ry > max_r + 1e-12) {
            throw DomainError("interp_bilinear: point outside non-periodic axis y");
        }
        ry = std::clamp(ry, 0.0, max_r - 1e-15);
    }
    int i0 = static_cast<int>(std::floor(rx));
    int j0 = static_cast<int>(std::floor(ry));
    double fx = rx - i0;
    double fy = ry - j0;
    const double s00 = sample(i0, j0);
    const double s10 = sample(i0 + 1, j0);
    const double s01 = sample(i0, j0 + 1);
    const double s11 = sample(i0 + 1, j0 + 1);
    return (1 - fx) * (1 - fy) * s00 + fx * (1 - fy) * s10 +
           (1 - fx) * fy * s01 + fx * fy * s11;
}

} // namespace

double interp_bilinear(const ScalarField& f, const Vec2& x) {
    const Grid& g = f.grid;
    const Vec2 lo = f.centering == Centering::node
                        ? g.origin
                        : Vec2(g.origin + Vec2(0.5 * g.h, 0.5 * g.h));
    const bool node_like = f.centering == Centering::node;
    return interp_lattice(
        g, lo, g.nx, g.ny, node_like, node_like,
        [&](int i, int j) { return f.read(i, j); }, x);
}

Vec2 interp_bilinear(const VectorFieldMAC& w, const Vec2& x) {
    const Grid& g = w.grid;
    const double ux = interp_lattice(
        g, Vec2(g.origin + Vec2(0.0, 0.5 * g.h)), g.nx, g.ny, true, false,
        [&](int i, int j) { return w.read_u(i, j); }, x);
    const double vy = interp_lattice(
        g, Vec2(g.origin + Vec2(0.5 * g.h, 0.0)), g.nx, g.ny, false, true,
        [&](int i, int j) { return w.read_v(i, j); }, x);
    return {ux, vy};
}

double interp_bicubic(const ScalarField& f, const Vec2& xq) {
    const Grid& g = f.grid;
    const bool node_like = f.centering == Centering::node;
    const Vec2 lo = node_like ? g.origin : Vec2(g.origin + Vec2(0.5 * g.h, 0.5 * g.h));

    Vec2 x = xq;
    if (g.periodic_x) {
        x.x() = lo.x() + std::fmod(x.x() - lo.x(), g.extent.x());
        if (x.x() < lo.x()) x.x() += g.extent.x();
    }
    if (g.periodic_y) {
        x.y() = lo.y() + std::fmod(x.y() - lo.y(), g.extent.y());
        if (x.y() < lo.y()) x.y() += g.extent.y();
    }
    double rx = (x.x() - lo.x()) / g.h;
    double ry = (x.y() - lo.y()) / g.h;
    const double max_rx = node_like ? g.nx : g.nx - 1;
    const double max_ry = node_like ? g.ny : g.ny - 1;
    if (!g.periodic_x) {
        if (rx < -1e-12 || rx > max_rx + 1e-12) {
            throw DomainError("interp_bicubic: point outside non-periodic axis x");
        }
        rx = std::clamp(rx, 0.0, max_rx - 1e-15);
    }
    if (!g.periodic_y) {
        if (ry < -1e-12 || ry > max_ry + 1e-12) {
            throw DomainError("interp_bicubic: point outside non-periodic axis y");
        }
        ry = std::clamp(ry, 0.0, max_ry - 1e-15);
    }
    const int i0 = static_cast<int>(std::floor(rx));
    const int j0 = static_cast<int>(std::floor(ry));
    const double tx = rx - i0;
    const double ty = ry - j0;

    auto weights = [](double t, double w[4]) {
        w[0] = 0.5 * (-t * t * t + 2 * t * t - t);
        w[1] = 0.5 * (3 * t * t * t - 5 * t * t + 2);
        w[2] = 0.5 * (-3 * t * t * t + 4 * t * t + t);
        w[3] = 0.5 * (t * t * t - t * t);
    };
    double wx[4], wy[4];
    weights(tx, wx);
    weights(ty, wy);
    double acc = 0.0;
    for (int b = 0; b < 4; ++b) {
        for (int a = 0; a < 4; ++a) {
            acc += wx[a] * wy[b] * f.read(i0 - 1 + a, j0 - 1 + b);
        }
    }
    return acc;
}

void write_field(std::ostream& os, const ScalarField& f,
                 const std::string& name, double t, bool binary) {
    os << "FIELD " << name << " " << to_string(f.centering) << " "
       << f.grid.nx << " " << f.grid.ny << " " << format_double(f.grid.h)
       << " " << format_double(t) << "\n";
    if (binary) {
        os << "BINARY\n";
        for (int j = 0; j < f.size_y(); ++j) {
            for (int i = 0; i < f.size_x(); ++i) {
                const double v = f.at(i, j);
                os.write(reinterpret_cast<const char*>(&v), sizeof(double));
            }
        }
        return;
    }
    for (int j = 0; j < f.size_y(); ++j) {
        for (int i = 0; i < f.size_x(); ++i) {
            os << (i ? " " : "") << format_double(f.at(i, j));
        }
        os << "\n";
    }
}

void write_field(const std::string& path, const ScalarField& f,
                 const std::string& name, double t, bool binary) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_field(os, f, name, t, binary);
}

NamedField read_field(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw IoError("empty field stream");
    std::istringstream hs(header);
    std::string tag, name, centering;
    int nx = 0, ny = 0;
    double h = 0.0, t = 0.0;
    hs >> tag >> name >> centering >> nx >> ny >> h >> t;
    if (tag != "FIELD" || hs.fail()) {
        throw IoError("malformed FIELD header: '" + header + "'");
    }
    Grid g({0, 0}, {nx * h, ny * h}, nx, ny);
    NamedField out{name, t, ScalarField(g, centering_from_string(centering))};
    ScalarField& f = out.field;

    const auto mark = is.tellg();
    std::string maybe_binary;
    std::getline(is, maybe_binary);
    if (maybe_binary == "BINARY") {
        for (int j = 0; j < f.size_y(); ++j) {
            for (int i = 0; i < f.size_x(); ++i) {
                double v = 0.0;
                is.read(reinterpret_cast<char*>(&v), sizeof(double));
                if (!is) throw IoError("truncated binary field block");
                f.at(i, j) = v;
            }
        }
        return out;
    }
    is.seekg(mark);
    for (int j = 0; j < f.size_y(); ++j) {
        for (int i = 0; i < f.size_x(); ++i) {
            double v = 0.0;
            if (!(is >> v)) throw IoError("truncated ASCII field block");
            f.at(i, j) = v;
        }
    }
    return out;
}

NamedField read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    return read_field(is);
}

} // namespace iim
