#ifndef RECGRAPH_ANALYTICS_HPP
#define RECGRAPH_ANALYTICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include <recgraph/increments.hpp>
#include <recgraph/offspring.hpp>

namespace recgraph {

namespace detail {
// psi(x) = sum_{k>=0} p_k x^{k+1} + p_{-1} - x, evaluated by Horner on the
// dense coefficient vector (degree = max support value + 1).
inline double psi_eval(const IncrementLaw& law, double x) {
    const long long deg = std::max<long long>(law.max_value() + 1, 1);
    std::vector<double> coeff(static_cast<std::size_t>(deg) + 1, 0.0);
    coeff[0] = law.prob_of(-1);
    coeff[1] = law.prob_of(0) - 1.0;
    for (long long k = 1; k <= law.max_value(); ++k)
        coeff[static_cast<std::size_t>(k + 1)] = law.prob_of(k);
    double acc = 0.0;
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * x + *it;
    return acc;
}

inline double psi_deriv(const IncrementLaw& law, double x) {
    // sum_{k>=0} (k+1) p_k x^k - 1
    double acc = 0.0;
    for (long long k = law.max_value(); k >= 0; --k)
        acc = acc * x + static_cast<double>(k + 1) * law.prob_of(k);
    return acc - 1.0;
}
} // namespace detail

// c = P[walk from 0 ever hits -1]: 1 when the mean is <= 0, else the unique
// root of psi in (0,1). Bisection on a guaranteed bracket, Newton polish.
inline double hitting_prob_c(const IncrementLaw& law) {
    law.validate();
    if (law.kind != IncrementLaw::Kind::SkipFree)
        throw std::invalid_argument("hitting_prob_c: requires a skip-free law");
    if (law.mean() <= 0.0) return 1.0;

    // psi(0) = p_{-1} > 0; find hi < 1 with psi(hi) < 0 (psi'(1) = mean > 0).
    double hi = 1.0;
    double step = 0.5;
    while (step > 1e-14) {
        const double cand = 1.0 - step;
        if (detail::psi_eval(law, cand) < 0.0) {
            hi = cand;
            break;
        }
        step *= 0.5;
    }
    if (hi == 1.0) throw std::logic_error("hitting_prob_c: bracket search failed");
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::psi_eval(law, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double c = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double d = detail::psi_deriv(law, c);
        if (d == 0.0) break;
        const double next = c - detail::psi_eval(law, c) / d;
        if (next > 0.0 && next < 1.0) c = next;
    }
    return c;
}

// Doob h-transform: p_hat_k = p_k c^k, the law of the walk conditioned to hit
// -1. Normalization is forced by the defining equation of c.
inline IncrementLaw doob_transform(const IncrementLaw& law) {
    if (!(law.mean() > 0.0)) throw std::invalid_argument("doob_transform: requires positive mean");
    const double c = hitting_prob_c(law);
    std::vector<Atom> atoms;
    double sum = 0.0;
    for (const auto& [k, p] : law.atoms) {
        if (p <= 0.0) continue;
        const double q = p * std::pow(c, static_cast<double>(k));
        atoms.emplace_back(k, q);
        sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw std::logic_error("doob_transform: transformed law does not normalize");
    IncrementLaw out{std::move(atoms), IncrementLaw::Kind::SkipFree};
    out.validate();
    if (!(out.mean() < 0.0)) throw std::logic_error("doob_transform: expected negative drift");
    return out;
}

// pi(k) = P[X = k-1]: the offspring law of the record graph.
inline OffspringLaw offspring_from_increment(const IncrementLaw& law) {
    if (law.kind != IncrementLaw::Kind::SkipFree)
        throw std::invalid_argument("offspring_from_increment: requires a skip-free law");
    std::vector<std::pair<long long, double>> atoms;
    for (const auto& [k, p] : law.atoms)
        if (p > 0.0) atoms.emplace_back(k + 1, p);
    return make_offspring(std::move(atoms));
}

// pi_tilde(k) = c^{k-1} P[X = k-1]; pi_bar(k) = P[X >= k] c^k.
inline std::pair<OffspringLaw, OffspringLaw> derive_pis(const IncrementLaw& law) {
    const double c = hitting_prob_c(law);
    std::vector<std::pair<long long, double>> tilde;
    for (const auto& [k, p] : law.atoms)
        if (p > 0.0)
            tilde.emplace_back(k + 1, p * std::pow(c, static_cast<double>(k)));
    std::vector<std::pair<long long, double>> bar;
    for (long long k = 0; k <= law.max_value(); ++k) {
        const double t = law.tail_of(k) * std::pow(c, static_cast<double>(k));
        if (t > 0.0) bar.emplace_back(k, t);
    }
    auto check = [](const std::vector<std::pair<long long, double>>& atoms, const char* name) {
        double s = 0.0;
        for (const auto& [v, p] : atoms) s += p;
        if (std::abs(s - 1.0) > 1e-10)
            throw std::logic_error(std::string(name) + " does not normalize");
    };
    check(tilde, "pi_tilde");
    check(bar, "pi_bar");
    return {make_offspring(std::move(tilde)), make_offspring(std::move(bar))};
}

// P[tau < infinity, S_tau = j, X_{tau-1} = k] = P[X_0 = k] c^{k-j}.
inline double weak_record_joint(const IncrementLaw& law, long long j, long long k) {
    if (j < 0 || j > k) throw std::invalid_argument("weak_record_joint: requires 0 <= j <= k");
    const double c = hitting_prob_c(law);
    return law.prob_of(k) * std::pow(c, static_cast<double>(k - j));
}

struct WeakRecordBracket {
    double lower_bound = 0.0;  // exact mass of paths with tau <= depth
    double residual = 0.0;     // unabsorbed mass at depth (truncation error bound)
};

// Brute-force oracle: exact sum of path probabilities with tau = n <= depth,
// S_tau = j and X_{tau-1} = k, plus the mass still strictly negative at depth.
inline WeakRecordBracket weak_record_enumerate(const IncrementLaw& law, long long j, long long k,
                                               int depth) {
    if (depth < 1) throw std::invalid_argument("weak_record_enumerate: depth >= 1 required");
    if (j < 0 || j > k) throw std::invalid_argument("weak_record_enumerate: requires 0 <= j <= k");
    WeakRecordBracket out;
    // alive[s] = P[S_n = s, S_1 < 0, ..., S_n < 0]
    std::map<long long, double> alive{{0, 1.0}};
    for (int n = 1; n <= depth; ++n) {
        std::map<long long, double> next;
        for (const auto& [s, mass] : alive) {
            for (const auto& [v, p] : law.atoms) {
                if (p <= 0.0) continue;
                const long long s2 = s + v;
                if (s2 >= 0) {
                    if (s2 == j && v == k) out.lower_bound += mass * p;
                } else {
                    next[s2] += mass * p;
                }
            }
        }
        alive.swap(next);
    }
    for (const auto& [s, mass] : alive) out.residual += mass;
    return out;
}

// The analytic package around one skip-free law. The tilde/bar laws only
// normalize when the mean is non-negative; they stay empty otherwise.
struct DerivedLaws {
    IncrementLaw base;
    double c = 1.0;
    IncrementLaw doob;       // p_hat; equals base when mean <= 0 (c = 1)
    OffspringLaw offspring;  // pi = law of X_0 + 1
    std::optional<OffspringLaw> pi_tilde;
    std::optional<OffspringLaw> pi_bar;
};

inline DerivedLaws derive_laws(const IncrementLaw& law) {
    DerivedLaws out;
    out.base = law;
    out.c = hitting_prob_c(law);
    out.offspring = offspring_from_increment(law);
    if (law.mean() > 0.0) {
        out.doob = doob_transform(law);
        auto [tilde, bar] = derive_pis(law);
        out.pi_tilde = std::move(tilde);
        out.pi_bar = std::move(bar);
    } else {
        out.doob = law;
        if (law.mean() == 0.0) {
            auto [tilde, bar] = derive_pis(law);
            out.pi_tilde = std::move(tilde);
            out.pi_bar = std::move(bar);
        }
    }
    return out;
}

} // namespace recgraph

#endif
