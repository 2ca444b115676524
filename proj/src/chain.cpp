#include "metastab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "metastab/errors.hpp"

namespace metastab {

const char* to_string(ChainKind k) {
    switch (k) {
        case ChainKind::kFull: return "full";
        case ChainKind::kRestrictedLoop: return "restricted_loop";
        case ChainKind::kSubstochastic: return "substochastic";
    }
    return "?";
}

double ChainMatrix::entry(ProfileId x, ProfileId y) const {
    double v = 0.0;
    for_each_in_row(x, [&](ProfileId c, double p) {
        if (c == y) v += p;
    });
    return v;
}

double ChainMatrix::row_sum(ProfileId x) const {
    double s = 0.0;
    for_each_in_row(x, [&](ProfileId, double p) { s += p; });
    return s;
}

void ChainMatrix::step_into(const Dist& mu, Dist& out) const {
    out.assign(size(), 0.0);
    for (ProfileId x = 0; x < size(); ++x) {
        const double m = mu[x];
        if (m == 0.0) continue;
        for (std::size_t k = row_ptr_[x]; k < row_ptr_[x + 1]; ++k) out[col_[k]] += m * val_[k];
    }
}

Dist ChainMatrix::step(const Dist& mu) const {
    if (mu.size() != size()) throw InputError("distribution size does not match chain");
    Dist out;
    step_into(mu, out);
    return out;
}

std::vector<double> ChainMatrix::apply(const std::vector<double>& f) const {
    if (f.size() != size()) throw InputError("vector size does not match chain");
    std::vector<double> out(size(), 0.0);
    for (ProfileId x = 0; x < size(); ++x) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[x]; k < row_ptr_[x + 1]; ++k) s += val_[k] * f[col_[k]];
        out[x] = s;
    }
    return out;
}

Eigen::MatrixXd ChainMatrix::dense_on_support() const {
    const auto members = support_.members();
    std::vector<std::ptrdiff_t> pos(size(), -1);
    for (std::size_t a = 0; a < members.size(); ++a) pos[members[a]] = static_cast<std::ptrdiff_t>(a);
    const auto m = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t a = 0; a < members.size(); ++a) {
        for_each_in_row(members[a], [&](ProfileId y, double p) {
            if (pos[y] >= 0) D(static_cast<Eigen::Index>(a), pos[y]) += p;
        });
    }
    return D;
}

std::vector<double> boltzmann_update(const GameSpec& g, double beta, int player, ProfileId x) {
    if (!(beta >= 0.0)) throw InputError("beta must be >= 0");
    if (player < 0 || player >= g.players()) throw InputError("player out of range");
    const auto& idx = g.index();
    const int m = idx.radix(player);
    std::vector<double> w(static_cast<std::size_t>(m));
    double top = -INFINITY;
    for (int s = 0; s < m; ++s) {
        w[static_cast<std::size_t>(s)] = beta * g.utility(player, idx.with_strategy(x, player, s));
        top = std::max(top, w[static_cast<std::size_t>(s)]);
    }
    double z = 0.0;
    for (auto& v : w) {
        v = std::exp(v - top);
        z += v;
    }
    for (auto& v : w) v /= z;
    return w;
}

ChainMatrix build_chain(const GameSpec& g, double beta, const ChainLimits& limits) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InputError("beta must be finite and >= 0");
    if (g.size() > limits.max_profiles) {
        std::ostringstream os;
        os << "chain over " << g.size() << " profiles exceeds cap " << limits.max_profiles;
        throw CapError(os.str());
    }
    const auto& idx = g.index();
    const std::size_t size = g.size();
    const double inv_n = 1.0 / g.players();

    ChainMatrix P;
    P.kind_ = ChainKind::kFull;
    P.beta_ = beta;
    P.players_ = g.players();
    P.support_ = SubsetMask::full(size);
    P.row_ptr_.reserve(size + 1);
    P.col_.reserve(size * (1 + idx.degree()));
    P.val_.reserve(size * (1 + idx.degree()));
    P.row_ptr_.push_back(0);
    for (ProfileId x = 0; x < size; ++x) {
        const std::size_t diag = P.col_.size();
        P.col_.push_back(x);
        P.val_.push_back(0.0);
        double self = 0.0;
        for (int i = 0; i < g.players(); ++i) {
            const auto sigma = boltzmann_update(g, beta, i, x);
            const int cur = idx.strategy(x, i);
            for (int s = 0; s < idx.radix(i); ++s) {
                const double p = inv_n * sigma[static_cast<std::size_t>(s)];
                if (s == cur) {
                    self += p;
                } else {
                    P.col_.push_back(idx.with_strategy(x, i, s));
                    P.val_.push_back(p);
                }
            }
        }
        P.val_[diag] = self;
        P.row_ptr_.push_back(P.col_.size());
    }
    P.pi_ = g.has_potential() ? gibbs(g, beta) : stationary(P);
    return P;
}

ChainMatrix chain_from_rows(std::size_t size, const std::vector<std::vector<std::pair<ProfileId, double>>>& rows,
                            double beta, Dist reference) {
    if (rows.size() != size) throw InputError("row count does not match size");
    ChainMatrix P;
    P.kind_ = ChainKind::kFull;
    P.beta_ = beta;
    P.support_ = SubsetMask::full(size);
    P.row_ptr_.push_back(0);
    for (const auto& row : rows) {
        for (auto [y, p] : row) {
            if (y >= size || p < 0.0) throw InputError("bad chain entry");
            P.col_.push_back(y);
            P.val_.push_back(p);
        }
        P.row_ptr_.push_back(P.col_.size());
    }
    P.pi_ = reference.empty() ? stationary(P) : std::move(reference);
    return P;
}

Dist gibbs(const GameSpec& g, double beta) {
    const auto& phi = g.potential();
    Dist pi(phi.size());
    double top = -INFINITY;
    for (std::size_t x = 0; x < phi.size(); ++x) {
        pi[x] = -beta * phi[x];
        top = std::max(top, pi[x]);
    }
    double z = 0.0;
    for (auto& v : pi) {
        v = std::exp(v - top);
        z += v;
    }
    for (auto& v : pi) v /= z;
    return pi;
}

Dist stationary(const ChainMatrix& P, std::size_t dense_cap) {
    const std::size_t size = P.size();
    Dist pi(size, 1.0 / static_cast<double>(size));
    if (size <= dense_cap) {
        // (I − P)ᵀ πᵀ = 0 with the last equation replaced by Σπ = 1
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size)) -
                            P.dense_on_support().transpose();
        A.row(A.rows() - 1).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
        b(b.size() - 1) = 1.0;
        Eigen::VectorXd v = A.partialPivLu().solve(b);
        for (std::size_t x = 0; x < size; ++x) pi[x] = std::max(0.0, v(static_cast<Eigen::Index>(x)));
    }
    Dist next;
    for (int it = 0; it < 1000000; ++it) {
        P.step_into(pi, next);
        double s = 0.0;
        for (double v : next) s += v;
        double res = 0.0;
        for (std::size_t x = 0; x < size; ++x) {
            next[x] /= s;
            res = std::max(res, std::abs(next[x] - pi[x]));
        }
        pi.swap(next);
        if (res <= 1e-13) return pi;
    }
    throw NumericalError("stationary distribution: power iteration did not reach 1e-13");
}

ResidualCheck check_reversibility(const ChainMatrix& P, const Dist& pi, double tol) {
    if (pi.size() != P.size()) throw InputError("distribution size does not match chain");
    ResidualCheck r;
    // every pair with a nonzero in either direction appears in at least one scanned row
    for (ProfileId x = 0; x < P.size(); ++x) {
        P.for_each_in_row(x, [&](ProfileId y, double p) {
            if (y == x) return;
            const double v = std::abs(pi[x] * p - pi[y] * P.entry(y, x));
            if (v > r.worst) {
                r.worst = v;
                r.x = x;
                r.y = y;
            }
        });
    }
    r.pass = r.worst <= tol;
    return r;
}

ResidualCheck stationarity_residual(const ChainMatrix& P, const Dist& pi, double tol) {
    const Dist next = P.step(pi);
    ResidualCheck r;
    for (ProfileId y = 0; y < P.size(); ++y) {
        const double v = std::abs(next[y] - pi[y]);
        if (v > r.worst) {
            r.worst = v;
            r.x = y;
            r.y = y;
        }
    }
    r.pass = r.worst <= tol;
    return r;
}

namespace {

void check_subset(const ChainMatrix& P, const SubsetMask& L) {
    if (L.universe() != P.size()) throw InputError("subset universe does not match chain size");
    if (L.empty()) throw InputError("restriction needs a nonempty subset");
}

}  // namespace

ChainMatrix restrict_loop(const ChainMatrix& P, const SubsetMask& L) {
    check_subset(P, L);
    ChainMatrix R;
    R.kind_ = ChainKind::kRestrictedLoop;
    R.beta_ = P.beta_;
    R.players_ = P.players_;
    R.support_ = L & P.support_;
    R.row_ptr_.push_back(0);
    for (ProfileId x = 0; x < P.size(); ++x) {
        if (R.support_.contains(x)) {
            const std::size_t diag = R.col_.size();
            R.col_.push_back(x);
            R.val_.push_back(0.0);
            double self = 0.0;
            P.for_each_in_row(x, [&](ProfileId y, double p) {
                if (y == x || !R.support_.contains(y)) {
                    self += p;
                } else {
                    R.col_.push_back(y);
                    R.val_.push_back(p);
                }
            });
            R.val_[diag] = self;
        }
        R.row_ptr_.push_back(R.col_.size());
    }
    R.pi_ = conditional(P.pi_, R.support_);
    return R;
}

ChainMatrix restrict_kill(const ChainMatrix& P, const SubsetMask& L) {
    check_subset(P, L);
    ChainMatrix R;
    R.kind_ = ChainKind::kSubstochastic;
    R.beta_ = P.beta_;
    R.players_ = P.players_;
    R.support_ = L & P.support_;
    R.row_ptr_.push_back(0);
    for (ProfileId x = 0; x < P.size(); ++x) {
        if (R.support_.contains(x)) {
            P.for_each_in_row(x, [&](ProfileId y, double p) {
                if (R.support_.contains(y)) {
                    R.col_.push_back(y);
                    R.val_.push_back(p);
                }
            });
        }
        R.row_ptr_.push_back(R.col_.size());
    }
    R.pi_.assign(P.size(), 0.0);
    R.support_.for_each([&](ProfileId x) { R.pi_[x] = P.pi_[x]; });
    return R;
}

double mass(const Dist& mu, const SubsetMask& L) {
    double s = 0.0;
    L.for_each([&](ProfileId x) { s += mu[x]; });
    return s;
}

Dist conditional(const Dist& pi, const SubsetMask& L) {
    const double m = mass(pi, L);
    if (!(m > 0.0)) throw InputError("conditioning on a set of zero mass");
    Dist out(pi.size(), 0.0);
    L.for_each([&](ProfileId x) { out[x] = pi[x] / m; });
    return out;
}

Dist point_mass(std::size_t size, ProfileId x) {
    if (x >= size) throw InputError("profile index out of range");
    Dist d(size, 0.0);
    d[x] = 1.0;
    return d;
}

double edge_flow(const ChainMatrix& P, const Dist& pi, const SubsetMask& A, const SubsetMask& B) {
    double q = 0.0;
    A.for_each([&](ProfileId x) {
        P.for_each_in_row(x, [&](ProfileId y, double p) {
            if (B.contains(y)) q += pi[x] * p;
        });
    });
    return q;
}

double bottleneck(const ChainMatrix& P, const Dist& pi, const SubsetMask& L) {
    if (L.universe() != P.size()) throw InputError("subset universe does not match chain size");
    double m = 0.0, q = 0.0;
    L.for_each([&](ProfileId x) {
        m += pi[x];
        double out = 0.0;
        P.for_each_in_row(x, [&](ProfileId y, double p) {
            if (!L.contains(y)) out += p;
        });
        q += pi[x] * out;
    });
    if (!(m > 0.0)) throw InputError("bottleneck ratio of a set with zero stationary mass");
    return q / m;
}

double leave_probability(const ChainMatrix& P, ProfileId x, const SubsetMask& L) {
    double out = 0.0;
    P.for_each_in_row(x, [&](ProfileId y, double p) {
        if (!L.contains(y)) out += p;
    });
    return out;
}

}  // namespace metastab
