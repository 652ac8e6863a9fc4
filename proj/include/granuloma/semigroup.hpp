/**
 * @file semigroup.hpp
 * @brief Spectral Neumann heat semigroup on boxes.
 *
 * Cell-centered samples of cos(k pi x / L) are exactly the DCT-II basis, so
 * a field expands losslessly in the discrete cosine modes. The propagator
 * damps mode k by exp(-mu_k t), where mu_k is either the continuous Neumann
 * eigenvalue (k pi / L)^2 or the eigenvalue of the mirror-ghost stencil
 * (4 / h^2) sin^2(k pi / (2 N)).
 *
 * The four semigroup constants are only estimated here: the sampled
 * supremum is a lower bound for the true constant and is never rigorous.
 */
#pragma once

#include "granuloma/grid.hpp"

#include <cstdint>
#include <vector>

namespace granuloma {

enum class Eigenvalues { Continuous, Discrete };

/// First nonzero Neumann eigenvalue of -Laplacian on the box: (pi / L_max)^2.
double neumann_lambda(const BoxDomain& d);

class SpectralDomain {
public:
    explicit SpectralDomain(const BoxDomain& d);

    const BoxDomain& domain() const { return domain_; }
    double lambda() const { return neumann_lambda(domain_); }

    /// Coefficients a with f = sum_k a_k cos-mode_k (x fastest, like fields).
    std::vector<double> forward(std::span<const double> f) const;
    std::vector<double> inverse(std::span<const double> coeffs) const;

    /// Eigenvalue of -Laplacian for the mode at flat index m.
    double eigenvalue(std::size_t m, Eigenvalues kind) const;

private:
    void transform(std::span<const double> in, std::span<double> out, bool forward) const;

    BoxDomain domain_;
    // table_[axis][k * N + i] = cos(k pi (i + 1/2) / N)
    std::vector<double> table_[2];
};

Field heat_apply(const Field& f, double t, const BoxDomain& d,
                 Eigenvalues kind = Eigenvalues::Continuous);
Field heat_apply(const Field& f, double t, const SpectralDomain& sd,
                 Eigenvalues kind = Eigenvalues::Continuous);

/// Band-limited test field: random normal amplitudes on the first `modes`
/// cosine modes per axis (zero mean when requested). Deterministic in
/// (seed, sample); samples are independent substreams.
Field band_limited_noise(const SpectralDomain& sd, int modes, std::uint64_t seed,
                         std::uint64_t sample, bool zero_mean);

struct ConstantEstimate {
    double value = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    bool rigorous = false;
};

/// Empirical supremum over the slowest eigenfunction plus random fields and a
/// log-spaced time grid of
///   kind 1: |e^{tL} phi|_p / ((1 + t^{-n/2 (1/q - 1/p)}) e^{-lambda t} |phi|_q), mean-free phi
///   kind 2: |grad e^{tL} phi|_p / ((1 + t^{-1/2 - n/2 (1/q - 1/p)}) e^{-lambda t} |phi|_q)
///   kind 3: |grad e^{tL} phi|_p / ((1 + t^{-n/2 (1/q - 1/p)}) e^{-lambda t} |grad phi|_q)
///   kind 4: |e^{tL} div psi|_p / ((1 + t^{-1/2 - n/2 (1/q - 1/p)}) e^{-lambda t} |psi|_q),
///           psi = grad phi
/// p may be +infinity. Throws InvalidArgument on a bad exponent ordering.
ConstantEstimate estimate_constant(int kind, double p, double q, const BoxDomain& d, int samples,
                                   std::uint64_t seed = 20250101);

/// Time grid used by estimate_constant.
std::vector<double> estimate_time_grid(double lambda);

/// Ratio for a single field and time (what estimate_constant maximizes).
double constant_ratio(int kind, double p, double q, const Field& phi, double t,
                      const SpectralDomain& sd);

}  // namespace granuloma
