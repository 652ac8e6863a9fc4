/**
 * @file grid.hpp
 * @brief Cell-centered box grids (1D/2D) with homogeneous Neumann boundaries,
 *        the discrete operators used by the stepper, and discrete norms.
 *
 * Storage is row-major with x fastest: index = j * cells[0] + i.
 * Neumann boundaries are realized by mirror ghost cells, so every boundary
 * face carries zero normal gradient and zero flux.
 */
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace granuloma {

struct BoxDomain {
    int dim = 1;
    std::array<double, 2> extents{1.0, 1.0};
    std::array<int, 2> cells{1, 1};

    static BoxDomain line(double length, int n);
    static BoxDomain rectangle(double lx, double ly, int nx, int ny);

    void validate() const;

    double spacing(int axis) const { return extents[axis] / cells[axis]; }
    double h_min() const;
    double volume() const;
    double cell_volume() const;
    std::size_t size() const;
    /// Cell-center coordinate along an axis.
    double center(int axis, int i) const { return (i + 0.5) * spacing(axis); }
    bool operator==(const BoxDomain&) const = default;
};

/// Cell-centered scalar field; value semantics.
struct Field {
    std::vector<double> values;

    Field() = default;
    explicit Field(std::size_t n, double fill = 0.0) : values(n, fill) {}
    explicit Field(std::vector<double> v) : values(std::move(v)) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::span<double> span() { return values; }
    std::span<const double> span() const { return values; }
    bool operator==(const Field&) const = default;
};

struct SimState {
    double t = 0.0;
    Field u, v, w, z;

    /// All four fields sized for d, finite and >= 0.
    void validate(const BoxDomain& d) const;
};

// Span kernels (no allocation); the Field overloads below wrap them.

void laplacian_into(std::span<const double> f, std::span<double> out, const BoxDomain& d);

/// out = div(carrier * grad potential) with donor-cell upwinding.
/// Returns max |face gradient of potential| (needed for the CFL bound).
double chemo_divergence_into(std::span<const double> carrier, std::span<const double> potential,
                             std::span<double> out, const BoxDomain& d);

double max_face_gradient(std::span<const double> f, const BoxDomain& d);

Field laplacian(const Field& f, const BoxDomain& d);
Field chemo_divergence(const Field& carrier, const Field& potential, const BoxDomain& d);

enum class NormKind { L1, Lq, Linf, GradLq, W1q };

struct Norm {
    NormKind kind = NormKind::L1;
    double q = 2.0;
};

double norm(std::span<const double> f, Norm kind, const BoxDomain& d);
inline double norm(const Field& f, Norm kind, const BoxDomain& d) { return norm(f.span(), kind, d); }

double l1_norm(std::span<const double> f, const BoxDomain& d);
double lq_norm(std::span<const double> f, double q, const BoxDomain& d);
double linf_norm(std::span<const double> f);
/// Face-centered differences; boundary faces have zero gradient.
/// In 2D the x- and y-face contributions are summed (q-power form).
double grad_lq_norm(std::span<const double> f, double q, const BoxDomain& d);
double w1q_norm(std::span<const double> f, double q, const BoxDomain& d);

/// Volume-weighted mean.
double mean(std::span<const double> f, const BoxDomain& d);

}  // namespace granuloma
