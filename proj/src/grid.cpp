#include "granuloma/grid.hpp"

#include "granuloma/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace granuloma {

BoxDomain BoxDomain::line(double length, int n)
{
    BoxDomain d;
    d.dim = 1;
    d.extents = {length, 1.0};
    d.cells = {n, 1};
    d.validate();
    return d;
}

BoxDomain BoxDomain::rectangle(double lx, double ly, int nx, int ny)
{
    BoxDomain d;
    d.dim = 2;
    d.extents = {lx, ly};
    d.cells = {nx, ny};
    d.validate();
    return d;
}

void BoxDomain::validate() const
{
    if (dim != 1 && dim != 2) throw InvalidArgument("box grids support dim 1 or 2");
    for (int a = 0; a < dim; ++a) {
        if (cells[a] < 3) throw InvalidArgument("need at least 3 cells per axis");
        if (!(extents[a] > 0.0) || !std::isfinite(extents[a])) {
            throw InvalidArgument("extents must be positive and finite");
        }
    }
}

double BoxDomain::h_min() const
{
    return dim == 1 ? spacing(0) : std::min(spacing(0), spacing(1));
}

double BoxDomain::volume() const
{
    return dim == 1 ? extents[0] : extents[0] * extents[1];
}

double BoxDomain::cell_volume() const
{
    return dim == 1 ? spacing(0) : spacing(0) * spacing(1);
}

std::size_t BoxDomain::size() const
{
    return dim == 1 ? static_cast<std::size_t>(cells[0])
                    : static_cast<std::size_t>(cells[0]) * static_cast<std::size_t>(cells[1]);
}

void SimState::validate(const BoxDomain& d) const
{
    const std::size_t n = d.size();
    for (const Field* f : {&u, &v, &w, &z}) {
        if (f->size() != n) throw InvalidArgument("state field size does not match the grid");
        for (double x : f->values) {
            if (!std::isfinite(x) || x < 0.0) {
                throw InvalidArgument("state fields must be finite and nonnegative");
            }
        }
    }
}

namespace {

void check_sizes(std::size_t a, std::size_t b, const BoxDomain& d)
{
    if (a != d.size() || b != d.size()) throw InvalidArgument("field size does not match the grid");
}

// Upwinded face flux carrier * g, taking the carrier from the cell the flux leaves.
inline double donor_flux(double g, double c_left, double c_right)
{
    return g > 0.0 ? c_left * g : c_right * g;
}

}  // namespace

void laplacian_into(std::span<const double> f, std::span<double> out, const BoxDomain& d)
{
    check_sizes(f.size(), out.size(), d);
    const int nx = d.cells[0];
    const double ihx2 = 1.0 / (d.spacing(0) * d.spacing(0));
    if (d.dim == 1) {
        out[0] = (f[1] - f[0]) * ihx2;
        for (int i = 1; i < nx - 1; ++i) {
            out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * ihx2;
        }
        out[nx - 1] = (f[nx - 2] - f[nx - 1]) * ihx2;
        return;
    }
    const int ny = d.cells[1];
    const double ihy2 = 1.0 / (d.spacing(1) * d.spacing(1));
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        const std::size_t down = j > 0 ? row - nx : row;
        const std::size_t up = j < ny - 1 ? row + nx : row;
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = row + i;
            const double left = i > 0 ? f[c - 1] : f[c];
            const double right = i < nx - 1 ? f[c + 1] : f[c];
            out[c] = (left - 2.0 * f[c] + right) * ihx2 +
                     (f[down + i] - 2.0 * f[c] + f[up + i]) * ihy2;
        }
    }
}

double chemo_divergence_into(std::span<const double> carrier, std::span<const double> potential,
                             std::span<double> out, const BoxDomain& d)
{
    check_sizes(carrier.size(), potential.size(), d);
    check_sizes(out.size(), out.size(), d);
    const int nx = d.cells[0];
    const double hx = d.spacing(0);
    const double ihx = 1.0 / hx;
    double gmax = 0.0;
    std::fill(out.begin(), out.end(), 0.0);

    const int ny = d.dim == 1 ? 1 : d.cells[1];
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        for (int i = 0; i + 1 < nx; ++i) {
            const std::size_t a = row + i;
            const double g = (potential[a + 1] - potential[a]) * ihx;
            gmax = std::max(gmax, std::abs(g));
            const double flux = donor_flux(g, carrier[a], carrier[a + 1]) * ihx;
            out[a] += flux;
            out[a + 1] -= flux;
        }
    }
    if (d.dim == 2) {
        const double ihy = 1.0 / d.spacing(1);
        for (int j = 0; j + 1 < ny; ++j) {
            const std::size_t row = static_cast<std::size_t>(j) * nx;
            for (int i = 0; i < nx; ++i) {
                const std::size_t a = row + i;
                const std::size_t b = a + nx;
                const double g = (potential[b] - potential[a]) * ihy;
                gmax = std::max(gmax, std::abs(g));
                const double flux = donor_flux(g, carrier[a], carrier[b]) * ihy;
                out[a] += flux;
                out[b] -= flux;
            }
        }
    }
    return gmax;
}

double max_face_gradient(std::span<const double> f, const BoxDomain& d)
{
    check_sizes(f.size(), f.size(), d);
    const int nx = d.cells[0];
    const int ny = d.dim == 1 ? 1 : d.cells[1];
    const double ihx = 1.0 / d.spacing(0);
    double gmax = 0.0;
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        for (int i = 0; i + 1 < nx; ++i) {
            gmax = std::max(gmax, std::abs(f[row + i + 1] - f[row + i]) * ihx);
        }
    }
    if (d.dim == 2) {
        const double ihy = 1.0 / d.spacing(1);
        for (std::size_t a = 0; a + nx < f.size(); ++a) {
            gmax = std::max(gmax, std::abs(f[a + nx] - f[a]) * ihy);
        }
    }
    return gmax;
}

Field laplacian(const Field& f, const BoxDomain& d)
{
    Field out(f.size());
    laplacian_into(f.span(), out.span(), d);
    return out;
}

Field chemo_divergence(const Field& carrier, const Field& potential, const BoxDomain& d)
{
    Field out(carrier.size());
    chemo_divergence_into(carrier.span(), potential.span(), out.span(), d);
    return out;
}

double l1_norm(std::span<const double> f, const BoxDomain& d)
{
    double s = 0.0;
    for (double x : f) s += std::abs(x);
    return s * d.cell_volume();
}

double lq_norm(std::span<const double> f, double q, const BoxDomain& d)
{
    if (!(q >= 1.0)) throw InvalidArgument("norm exponent must be >= 1");
    if (std::isinf(q)) return linf_norm(f);
    // Scale by the max to keep |x|^q away from under/overflow.
    const double scale = linf_norm(f);
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : f) s += std::pow(std::abs(x) / scale, q);
    return scale * std::pow(s * d.cell_volume(), 1.0 / q);
}

double linf_norm(std::span<const double> f)
{
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

namespace {

// Visits every interior face gradient, x faces first.
template <typename Fn>
void for_each_face_gradient(std::span<const double> f, const BoxDomain& d, Fn&& fn)
{
    const int nx = d.cells[0];
    const int ny = d.dim == 1 ? 1 : d.cells[1];
    const double ihx = 1.0 / d.spacing(0);
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        for (int i = 0; i + 1 < nx; ++i) fn((f[row + i + 1] - f[row + i]) * ihx);
    }
    if (d.dim == 2) {
        const double ihy = 1.0 / d.spacing(1);
        for (std::size_t a = 0; a + nx < f.size(); ++a) fn((f[a + nx] - f[a]) * ihy);
    }
}

}  // namespace

double grad_lq_norm(std::span<const double> f, double q, const BoxDomain& d)
{
    if (!(q >= 1.0)) throw InvalidArgument("norm exponent must be >= 1");
    check_sizes(f.size(), f.size(), d);
    const double scale = max_face_gradient(f, d);
    if (scale == 0.0) return 0.0;
    if (std::isinf(q)) return scale;
    double s = 0.0;
    for_each_face_gradient(f, d, [&](double g) { s += std::pow(std::abs(g) / scale, q); });
    return scale * std::pow(s * d.cell_volume(), 1.0 / q);
}

double w1q_norm(std::span<const double> f, double q, const BoxDomain& d)
{
    const double a = lq_norm(f, q, d);
    const double b = grad_lq_norm(f, q, d);
    if (std::isinf(q)) return std::max(a, b);
    const double scale = std::max(a, b);
    if (scale == 0.0) return 0.0;
    return scale * std::pow(std::pow(a / scale, q) + std::pow(b / scale, q), 1.0 / q);
}

double norm(std::span<const double> f, Norm kind, const BoxDomain& d)
{
    switch (kind.kind) {
    case NormKind::L1: return l1_norm(f, d);
    case NormKind::Lq: return lq_norm(f, kind.q, d);
    case NormKind::Linf: return linf_norm(f);
    case NormKind::GradLq: return grad_lq_norm(f, kind.q, d);
    case NormKind::W1q: return w1q_norm(f, kind.q, d);
    }
    throw InvalidArgument("unknown norm kind");
}

double mean(std::span<const double> f, const BoxDomain& d)
{
    double s = 0.0;
    for (double x : f) s += x;
    return s * d.cell_volume() / d.volume();
}

}  // namespace granuloma
