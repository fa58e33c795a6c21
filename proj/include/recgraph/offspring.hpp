#ifndef RECGRAPH_OFFSPRING_HPP
#define RECGRAPH_OFFSPRING_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace recgraph {

// Finite-support probability law on {0, 1, 2, ...}.
struct OffspringLaw {
    std::vector<std::pair<long long, double>> atoms; // sorted, distinct, probs >= 0

    static constexpr double kProbTol = 1e-12;

    void validate() const {
        if (atoms.empty()) throw std::invalid_argument("OffspringLaw: no atoms");
        double sum = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (atoms[i].first < 0) throw std::invalid_argument("OffspringLaw: negative value");
            if (atoms[i].second < 0.0) throw std::invalid_argument("OffspringLaw: negative probability");
            if (i > 0 && atoms[i].first <= atoms[i - 1].first)
                throw std::invalid_argument("OffspringLaw: values must be distinct and sorted");
            sum += atoms[i].second;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw std::invalid_argument("OffspringLaw: probabilities sum to " + std::to_string(sum));
    }

    double mean() const {
        double m = 0.0;
        for (const auto& [v, p] : atoms) m += static_cast<double>(v) * p;
        return m;
    }

    double prob_of(long long v) const {
        for (const auto& [val, p] : atoms)
            if (val == v) return p;
        return 0.0;
    }

    long long max_value() const { return atoms.back().first; }

    long long sample(double u) const {
        double acc = 0.0;
        for (const auto& [v, p] : atoms) {
            acc += p;
            if (u < acc) return v;
        }
        return atoms.back().first;
    }
};

inline OffspringLaw make_offspring(std::vector<std::pair<long long, double>> atoms) {
    std::sort(atoms.begin(), atoms.end());
    OffspringLaw law{std::move(atoms)};
    law.validate();
    return law;
}

// Size-biased law pi_hat(k) = k pi(k) / m(pi).
inline OffspringLaw size_biased(const OffspringLaw& pi) {
    const double m = pi.mean();
    if (!(m > 0.0))
        throw std::invalid_argument("size_biased: law has zero mean (no positive atoms)");
    std::vector<std::pair<long long, double>> atoms;
    for (const auto& [k, p] : pi.atoms)
        if (k > 0 && p > 0.0) atoms.emplace_back(k, static_cast<double>(k) * p / m);
    return make_offspring(std::move(atoms));
}

} // namespace recgraph

#endif
