#include "metastab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "metastab/errors.hpp"
#include "metastab/rng.hpp"

namespace metastab {

namespace {

void check_dense(std::size_t m, const SpectralLimits& limits, const char* what) {
    if (m > limits.dense_max) {
        std::ostringstream os;
        os << what << ": " << m << " states exceeds the dense eigensolve cap " << limits.dense_max;
        throw CapError(os.str());
    }
}

bool reversible_wrt_reference(const ChainMatrix& P) {
    const Dist& pi = P.reference();
    double scale = 0.0;
    for (double v : pi) scale = std::max(scale, v);
    return check_reversibility(P, pi, 1e-11 * std::max(scale, 1e-300)).pass;
}

}  // namespace

Eigen::MatrixXd symmetrized(const ChainMatrix& K) {
    // for a reversible pair, sqrt(π_a/π_b) K_ab = sqrt(K_ab K_ba); this form never divides by π
    Eigen::MatrixXd D = K.dense_on_support();
    const auto m = D.rows();
    Eigen::MatrixXd S(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) S(a, b) = std::sqrt(D(a, b) * D(b, a));
    }
    return S;
}

Spectrum spectrum(const ChainMatrix& P, const SpectralLimits& limits) {
    const std::size_t m = P.support().count();
    check_dense(m, limits, "spectrum");
    Spectrum out;
    out.kind = P.kind();
    if (reversible_wrt_reference(P)) {
        out.symmetrized = true;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(P), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
        const auto& ev = es.eigenvalues();
        for (Eigen::Index i = ev.size(); i-- > 0;) out.eigenvalues.push_back(ev(i));
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(P.dense_on_support(), false);
        if (es.info() != Eigen::Success) throw NumericalError("general eigensolve failed");
        const auto ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev(i).imag()) <= 1e-9) out.eigenvalues.push_back(ev(i).real());
        }
        std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
    }
    const auto& ev = out.eigenvalues;
    if (P.kind() == ChainKind::kSubstochastic) {
        for (double v : ev) out.lambda_star = std::max(out.lambda_star, std::abs(v));
    } else {
        for (std::size_t i = 1; i < ev.size(); ++i) out.lambda_star = std::max(out.lambda_star, std::abs(ev[i]));
    }
    out.t_rel = out.lambda_star < 1.0 ? 1.0 / (1.0 - out.lambda_star) : INFINITY;
    return out;
}

KilledEigen lambda_max_killed(const ChainMatrix& K, const SpectralLimits& limits) {
    if (K.support().empty()) throw InputError("killed chain has an empty support");
    const auto members = K.support().members();
    const Dist& pi = K.reference();
    KilledEigen out;
    out.phi.assign(K.size(), 0.0);
    Eigen::VectorXd v;
    if (members.size() <= limits.dense_max) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(K));
        if (es.info() != Eigen::Success) throw NumericalError("killed-chain eigensolve failed");
        const auto last = es.eigenvalues().size() - 1;
        out.lambda_max = es.eigenvalues()(last);
        v = es.eigenvectors().col(last);
    } else {
        out.power_iteration = true;
        std::vector<std::ptrdiff_t> pos(K.size(), -1);
        for (std::size_t a = 0; a < members.size(); ++a) pos[members[a]] = static_cast<std::ptrdiff_t>(a);
        std::vector<std::vector<std::pair<std::size_t, double>>> rows(members.size());
        for (std::size_t a = 0; a < members.size(); ++a) {
            K.for_each_in_row(members[a], [&](ProfileId y, double p) {
                const double back = K.entry(y, members[a]);
                rows[a].emplace_back(static_cast<std::size_t>(pos[y]), std::sqrt(p * back));
            });
        }
        v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(members.size())).normalized();
        Eigen::VectorXd w(v.size());
        double lambda = 0.0;
        bool converged = false;
        for (int it = 0; it < 10000000; ++it) {
            for (std::size_t a = 0; a < rows.size(); ++a) {
                double s = 0.0;
                for (auto [b, c] : rows[a]) s += c * v(static_cast<Eigen::Index>(b));
                w(static_cast<Eigen::Index>(a)) = s;
            }
            const double next = v.dot(w);
            const double norm = w.norm();
            if (norm == 0.0) break;
            const double change = std::abs(next - lambda);
            lambda = next;
            v = w / norm;
            if (it > 10 && change <= 1e-15) {
                converged = true;
                break;
            }
        }
        out.lambda_max = lambda;
        // residual ‖Sv − λv‖
        for (std::size_t a = 0; a < rows.size(); ++a) {
            double s = 0.0;
            for (auto [b, c] : rows[a]) s += c * v(static_cast<Eigen::Index>(b));
            out.residual = std::max(out.residual, std::abs(s - lambda * v(static_cast<Eigen::Index>(a))));
        }
        if (!converged || out.residual > 1e-12) {
            std::ostringstream os;
            os << "power iteration for the killed chain did not converge (residual " << out.residual << ")";
            throw NumericalError(os.str());
        }
    }
    if (v.sum() < 0) v = -v;
    for (std::size_t a = 0; a < members.size(); ++a) {
        const double p = pi[members[a]];
        out.phi[members[a]] = p > 0.0 ? v(static_cast<Eigen::Index>(a)) / std::sqrt(p) : 0.0;
    }
    return out;
}

double dirichlet_form(const ChainMatrix& P, const Dist& pi, const std::vector<double>& phi) {
    if (phi.size() != P.size() || pi.size() != P.size()) throw InputError("vector size does not match chain");
    double e = 0.0;
    for (ProfileId x = 0; x < P.size(); ++x) {
        P.for_each_in_row(x, [&](ProfileId y, double p) {
            const double d = phi[x] - phi[y];
            e += pi[x] * p * d * d;
        });
    }
    return 0.5 * e;
}

namespace {

double quotient(const ChainMatrix& P, const std::vector<double>& phi) {
    const Dist& pi = P.reference();
    double norm = 0.0;
    for (std::size_t x = 0; x < phi.size(); ++x) norm += pi[x] * phi[x] * phi[x];
    return dirichlet_form(P, pi, phi) / norm;
}

}  // namespace

RayleighReport rayleigh_check(const ChainMatrix& P, const SubsetMask& L, std::uint64_t seed, int samples) {
    if (P.kind() != ChainKind::kFull) throw InputError("rayleigh_check needs the full chain");
    const auto K = restrict_kill(P, L);
    const auto top = lambda_max_killed(K);
    RayleighReport r;
    r.gap = 1.0 - top.lambda_max;
    r.eigvec_quotient = quotient(P, top.phi);
    r.attains = std::abs(r.eigvec_quotient - r.gap) <= 1e-8;
    r.samples = samples;
    r.min_random_quotient = INFINITY;
    CounterRng rng(seed, 0x7261796cULL);
    const auto members = L.members();
    std::vector<double> phi(P.size(), 0.0);
    for (int s = 0; s < samples; ++s) {
        bool nonzero = false;
        for (ProfileId x : members) {
            phi[x] = 2.0 * rng.uniform() - 1.0;
            nonzero |= phi[x] != 0.0;
        }
        if (!nonzero) continue;
        r.min_random_quotient = std::min(r.min_random_quotient, quotient(P, phi));
    }
    r.lower_bound_holds = r.min_random_quotient >= r.gap - 1e-8;
    return r;
}

std::vector<double> null_covector(const ProfileIndex& index, ProfileId anchor) {
    std::vector<double> f(index.size(), 0.0);
    const int n = index.players();
    // enumerate the 2^n profiles z with z_i ∈ {x_i, s_i*}
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        ProfileId z = anchor;
        int j = 0;
        for (int i = 0; i < n; ++i) {
            if ((bits >> i) & 1u) {
                const int xi = index.strategy(anchor, i);
                z = index.with_strategy(z, i, (xi + 1) % index.radix(i));
                ++j;
            }
        }
        f[z] = (j % 2 == 0) ? -1.0 : 1.0;
    }
    return f;
}

TraceDetReport trace_and_det_report(const GameSpec& g, double beta, ProfileId anchor) {
    const auto& idx = g.index();
    if (anchor >= g.size()) throw InputError("anchor profile out of range");
    TraceDetReport r;
    r.anchor = anchor;
    const int n = g.players();
    for (int i = 0; i < n; ++i) {
        double prod = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) prod *= idx.radix(j);
        }
        r.trace_formula += prod;
    }
    r.trace_formula /= n;

    auto trace_of = [&](const ChainMatrix& P) {
        double t = 0.0;
        for (ProfileId x = 0; x < P.size(); ++x) t += P.entry(x, x);
        return t;
    };
    const auto P = build_chain(g, beta);
    r.trace = trace_of(P);
    r.trace_ok = std::abs(r.trace - r.trace_formula) <= 1e-10;
    for (double b : {0.0, 1.0, 5.0}) {
        const double t = trace_of(build_chain(g, b));
        r.trace_at_betas.push_back(t);
        r.trace_ok = r.trace_ok && std::abs(t - r.trace_formula) <= 1e-10;
    }

    if (g.has_potential()) {
        r.det = std::abs(symmetrized(P).partialPivLu().determinant());
    } else {
        r.det_via_singular_value = true;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(P.dense_on_support());
        r.det = svd.singularValues()(svd.singularValues().size() - 1);
    }
    r.covector_applicable = std::all_of(g.strategy_counts().begin(), g.strategy_counts().end(),
                                        [](int m) { return m >= 2; });
    r.det_ok = !r.covector_applicable || r.det <= 1e-9;

    if (r.covector_applicable) {
        const auto f = null_covector(idx, anchor);
        const Dist fp = P.step(f);
        for (double v : fp) r.covector_residual = std::max(r.covector_residual, std::abs(v));
        for (ProfileId x = 0; x < g.size(); ++x) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const int xi = idx.strategy(x, i);
                s += P.entry(idx.with_strategy(x, i, (xi + 1) % idx.radix(i)), x);
            }
            r.loop_residual = std::max(r.loop_residual, std::abs(s - P.entry(x, x)));
        }
    }
    r.covector_ok = r.covector_residual <= 1e-9;
    r.loop_ok = r.loop_residual <= 1e-12;
    return r;
}

}  // namespace metastab
