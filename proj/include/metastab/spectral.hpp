#pragma once

#include <cstdint>
#include <vector>

#include "metastab/chain.hpp"

namespace metastab {

struct SpectralLimits {
    std::size_t dense_max = 4096;
};

struct Spectrum {
    std::vector<double> eigenvalues;  // non-increasing
    double lambda_star = 0.0;         // max_{i≥2} |λ_i| (largest |λ| for substochastic)
    double t_rel = 0.0;               // 1/(1 − λ*), +inf when λ* = 1
    bool symmetrized = false;
    ChainKind kind = ChainKind::kFull;
};

/// Eigenvalues of P on its support. Reversible chains (w.r.t. the attached reference) are
/// symmetrized by D^{1/2} P D^{−1/2}; otherwise a general eigensolve keeps eigenvalues whose
/// imaginary part is within 1e−9 of zero.
Spectrum spectrum(const ChainMatrix& P, const SpectralLimits& limits = {});

/// Symmetrized D^{1/2} K D^{−1/2} of a chain reversible w.r.t. its reference, on the support.
Eigen::MatrixXd symmetrized(const ChainMatrix& K);

struct KilledEigen {
    double lambda_max = 0.0;
    /// Top eigenvector mapped back to the original basis (D^{−1/2} v), zero outside L, full length.
    std::vector<double> phi;
    bool power_iteration = false;
    double residual = 0.0;
};

/// λ^{L̄}_max of a substochastic chain: dense symmetric eigensolve up to the cap,
/// power iteration on the symmetrized form beyond it.
KilledEigen lambda_max_killed(const ChainMatrix& K, const SpectralLimits& limits = {});

/// E_P(φ) = ½ Σ π(x)P(x,y)(φ(x) − φ(y))².
double dirichlet_form(const ChainMatrix& P, const Dist& pi, const std::vector<double>& phi);

struct RayleighReport {
    double gap = 0.0;               // 1 − λ^{L̄}_max
    double eigvec_quotient = 0.0;   // E_P(φ*)/E_π[φ*²]
    double min_random_quotient = 0.0;
    int samples = 0;
    bool attains = false;           // |eigvec_quotient − gap| ≤ 1e−8
    bool lower_bound_holds = false; // all random quotients ≥ gap − 1e−8
};

/// Variational check of 1 − λ^{L̄}_max = inf_{φ supported on L} E_P(φ)/E_π[φ²].
RayleighReport rayleigh_check(const ChainMatrix& P, const SubsetMask& L, std::uint64_t seed = 1,
                              int samples = 200);

struct TraceDetReport {
    double trace = 0.0;
    double trace_formula = 0.0;
    std::vector<double> trace_at_betas;  // β = 0, 1, 5
    bool trace_ok = false;
    double det = 0.0;                    // |det| (symmetrized LU) or σ_min (general)
    bool det_via_singular_value = false;
    bool det_ok = false;
    bool covector_applicable = false;    // all m_i ≥ 2
    ProfileId anchor = 0;
    double covector_residual = 0.0;      // max |fᵀP|
    bool covector_ok = false;
    double loop_residual = 0.0;
    bool loop_ok = false;
    bool pass() const { return trace_ok && det_ok && covector_ok && loop_ok; }
};

/// Trace value and β-independence, det(P) = 0, the shell null covector, and the loop identity.
TraceDetReport trace_and_det_report(const GameSpec& g, double beta, ProfileId anchor = 0);

/// f = −1 on even shells around the anchor, +1 on odd shells, 0 elsewhere (s_i* = x_i + 1 mod m_i).
std::vector<double> null_covector(const ProfileIndex& index, ProfileId anchor);

}  // namespace metastab
