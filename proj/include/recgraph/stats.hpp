#ifndef RECGRAPH_STATS_HPP
#define RECGRAPH_STATS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <recgraph/rng.hpp>
#include <recgraph/tree.hpp>

namespace recgraph {

// Deterministic sharded runner: samples are split over a fixed number of
// logical shards (i mod kLogicalShards) that worker threads pull from, and
// results are merged in shard order. Accumulation order is therefore
// identical for every thread count. `body(sample_index, shard_state)`.
inline constexpr long long kLogicalShards = 64;

template <class State, class Body>
inline std::vector<State> run_sharded(long long n_samples, unsigned threads, Body&& body) {
    if (threads == 0) threads = 1;
    std::vector<State> states(static_cast<std::size_t>(kLogicalShards));
    std::atomic<long long> next_shard{0};
    auto worker = [&] {
        while (true) {
            const long long s = next_shard.fetch_add(1);
            if (s >= kLogicalShards) return;
            State& st = states[static_cast<std::size_t>(s)];
            for (long long i = s; i < n_samples; i += kLogicalShards) body(i, st);
        }
    };
    std::vector<std::thread> workers;
    const unsigned n_workers = std::min<unsigned>(threads, static_cast<unsigned>(kLogicalShards));
    workers.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
    return states;
}

// Frequency map over canonical ball keys.
struct EmpiricalLaw {
    int radius = 0;
    long long total = 0;
    long long dropped = 0; // censored samples, excluded from the law
    std::map<std::string, long long> counts;

    double prob_of(const std::string& key) const {
        const auto it = counts.find(key);
        return it == counts.end() ? 0.0
                                  : static_cast<double>(it->second) / static_cast<double>(total);
    }

    void merge(const EmpiricalLaw& other) {
        total += other.total;
        dropped += other.dropped;
        for (const auto& [k, c] : other.counts) counts[k] += c;
    }
};

// N samples reduced to radius-r ball keys around their roots; samples whose
// r-ball is not fully resolved are dropped and counted.
template <class TreeSampler>
inline EmpiricalLaw empirical_local_law(TreeSampler&& sampler, int radius, long long n_samples,
                                        std::uint64_t seed, unsigned threads = 1) {
    auto shards = run_sharded<EmpiricalLaw>(n_samples, threads, [&](long long i, EmpiricalLaw& law) {
        const OrderedTree t = sampler(sample_seed(seed, static_cast<std::uint64_t>(i)));
        if (t.empty() || !ball_fully_resolved(t, t.root(), radius)) {
            ++law.dropped;
            return;
        }
        ++law.total;
        ++law.counts[ball_key(t, t.root(), radius).key];
    });
    EmpiricalLaw out;
    out.radius = radius;
    for (const auto& s : shards) out.merge(s);
    return out;
}

inline double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    if (a.radius != b.radius) throw std::invalid_argument("tv_distance: radius mismatch");
    if (a.total == 0 || b.total == 0) throw std::invalid_argument("tv_distance: empty law");
    double tv = 0.0;
    auto ia = a.counts.begin();
    auto ib = b.counts.begin();
    while (ia != a.counts.end() || ib != b.counts.end()) {
        if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
            tv += static_cast<double>(ia->second) / static_cast<double>(a.total);
            ++ia;
        } else if (ia == a.counts.end() || ib->first < ia->first) {
            tv += static_cast<double>(ib->second) / static_cast<double>(b.total);
            ++ib;
        } else {
            tv += std::abs(static_cast<double>(ia->second) / static_cast<double>(a.total) -
                           static_cast<double>(ib->second) / static_cast<double>(b.total));
            ++ia;
            ++ib;
        }
    }
    return 0.5 * tv;
}

// Transport function: non-negative weight on ordered pairs, supported on
// pairs within `radius` of each other, depending only on the doubly rooted
// isomorphism class within that radius.
struct TransportFunction {
    std::string id;
    int radius = 2;
    std::function<double(const OrderedTree&, VertexId, VertexId)> weight;
};

// Ancestor-indicator family: h(T,u,v) = 1{F^k(u) = v} w(d1(u), d1(v)). All
// members are radius-bounded by k and isomorphism-invariant.
inline std::vector<TransportFunction> standard_transport_family(std::size_t count) {
    std::vector<TransportFunction> fam;
    for (std::size_t idx = 0; fam.size() < count; ++idx) {
        const int k = 1 + static_cast<int>(idx % 2);
        const std::uint64_t c1 = 1 + (idx / 2) % 5;
        const std::uint64_t c2 = 1 + (idx / 10) % 5;
        TransportFunction h;
        h.id = "anc" + std::to_string(k) + "_w" + std::to_string(c1) + "_" + std::to_string(c2);
        h.radius = k;
        h.weight = [k, c1, c2](const OrderedTree& t, VertexId u, VertexId v) -> double {
            VertexId a = u;
            for (int step = 0; step < k; ++step) {
                a = t.at(a).parent;
                if (a == kNoVertex) return 0.0;
            }
            if (a != v) return 0.0;
            const auto du = static_cast<std::uint64_t>(t.d1(u));
            const auto dv = static_cast<std::uint64_t>(t.d1(v));
            return 1.0 + static_cast<double>((du * c1 + dv * c2) % 3);
        };
        fam.push_back(std::move(h));
    }
    return fam;
}

struct MtpReport {
    double mean_out = 0.0;
    double mean_in = 0.0;
    double z_score = 0.0;
    long long samples = 0;
    long long dropped = 0;
};

namespace detail {
struct MtpAccum {
    long long n = 0;
    long long dropped = 0;
    long double sum_out = 0.0L;
    long double sum_in = 0.0L;
    long double sum_d = 0.0L;
    long double sum_d2 = 0.0L;
};
} // namespace detail

// Paired mass-transport check: out_i = sum_v h(T, o, v), in_i = sum_v
// h(T, v, o). Unimodular samplers give E[out - in] = 0; the z-score is for
// the paired difference. Samples must resolve every vertex within
// 2 * h.radius of the root (no hidden mass).
template <class TreeSampler>
inline MtpReport mtp_check(TreeSampler&& sampler, const TransportFunction& h, long long n_samples,
                           std::uint64_t seed, unsigned threads = 1) {
    auto shards =
        run_sharded<detail::MtpAccum>(n_samples, threads, [&](long long i, detail::MtpAccum& acc) {
            const OrderedTree t = sampler(sample_seed(seed, static_cast<std::uint64_t>(i)));
            if (t.empty() || !ball_fully_resolved(t, t.root(), 2 * h.radius)) {
                ++acc.dropped;
                return;
            }
            const VertexId o = t.root();
            double out_mass = 0.0;
            double in_mass = 0.0;
            for (std::size_t v = 0; v < t.size(); ++v) {
                out_mass += h.weight(t, o, static_cast<VertexId>(v));
                in_mass += h.weight(t, static_cast<VertexId>(v), o);
            }
            ++acc.n;
            acc.sum_out += out_mass;
            acc.sum_in += in_mass;
            const double d = out_mass - in_mass;
            acc.sum_d += d;
            acc.sum_d2 += static_cast<long double>(d) * d;
        });
    detail::MtpAccum total;
    for (const auto& s : shards) {
        total.n += s.n;
        total.dropped += s.dropped;
        total.sum_out += s.sum_out;
        total.sum_in += s.sum_in;
        total.sum_d += s.sum_d;
        total.sum_d2 += s.sum_d2;
    }
    MtpReport rep;
    rep.samples = total.n;
    rep.dropped = total.dropped;
    if (total.n == 0) return rep;
    const double n = static_cast<double>(total.n);
    rep.mean_out = static_cast<double>(total.sum_out) / n;
    rep.mean_in = static_cast<double>(total.sum_in) / n;
    const double mean_d = static_cast<double>(total.sum_d) / n;
    const double var_d =
        std::max(0.0, static_cast<double>(total.sum_d2) / n - mean_d * mean_d);
    const double se = std::sqrt(var_d / n);
    rep.z_score = se > 0.0 ? mean_d / se : (mean_d == 0.0 ? 0.0 : INFINITY);
    return rep;
}

struct IndependenceReport {
    double tv_joint_vs_product = 0.0;
    double p_value = 1.0;
    long long samples = 0;
    long long dropped = 0;
};

namespace detail {
inline double tv_joint_product(const std::vector<std::pair<long long, std::string>>& pairs) {
    std::map<long long, double> pa;
    std::map<std::string, double> pb;
    std::map<std::pair<long long, std::string>, double> pj;
    const double n = static_cast<double>(pairs.size());
    for (const auto& pr : pairs) {
        pa[pr.first] += 1.0 / n;
        pb[pr.second] += 1.0 / n;
        pj[pr] += 1.0 / n;
    }
    double tv = 0.0;
    for (const auto& [a, qa] : pa)
        for (const auto& [b, qb] : pb) {
            const auto it = pj.find({a, b});
            const double joint = it == pj.end() ? 0.0 : it->second;
            tv += std::abs(joint - qa * qb);
        }
    return 0.5 * tv;
}
} // namespace detail

// Independence of d1(root) from the non-descendant ball: TV between the
// empirical joint law and the product of marginals, with a permutation
// p-value (the sparse key table makes chi-square unreliable).
template <class PairSampler>
inline IndependenceReport independence_check(PairSampler&& sampler, long long n_samples,
                                             std::uint64_t seed, unsigned threads = 1,
                                             int permutations = 200) {
    struct Shard {
        std::vector<std::pair<long long, std::string>> pairs;
        long long dropped = 0;
    };
    auto shards = run_sharded<Shard>(n_samples, threads, [&](long long i, Shard& sh) {
        auto pr = sampler(sample_seed(seed, static_cast<std::uint64_t>(i)));
        if (!pr.has_value()) {
            ++sh.dropped;
            return;
        }
        sh.pairs.push_back(std::move(*pr));
    });
    std::vector<std::pair<long long, std::string>> pairs;
    IndependenceReport rep;
    for (auto& sh : shards) {
        rep.dropped += sh.dropped;
        for (auto& p : sh.pairs) pairs.push_back(std::move(p));
    }
    rep.samples = static_cast<long long>(pairs.size());
    if (pairs.empty()) return rep;
    rep.tv_joint_vs_product = detail::tv_joint_product(pairs);

    // permutation null: shuffle the second coordinate
    Rng rng(mix64(seed ^ 0x9e77ULL));
    int geq = 0;
    std::vector<std::pair<long long, std::string>> shuffled = pairs;
    for (int b = 0; b < permutations; ++b) {
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.next_below(i));
            std::swap(shuffled[i - 1].second, shuffled[j].second);
        }
        if (detail::tv_joint_product(shuffled) >= rep.tv_joint_vs_product) ++geq;
    }
    rep.p_value = (1.0 + geq) / (1.0 + permutations);
    return rep;
}

struct ScalarEstimate {
    double mean = 0.0;
    double ci95 = 0.0; // half-width
    long long samples = 0;
    long long dropped = 0;
};

// Standard Monte Carlo estimate with a normal 95% confidence interval.
// `statistic(seed)` returns nullopt for censored samples.
template <class Statistic>
inline ScalarEstimate scalar_estimate(Statistic&& statistic, long long n_samples,
                                      std::uint64_t seed, unsigned threads = 1) {
    struct Acc {
        long long n = 0;
        long long dropped = 0;
        long double sum = 0.0L;
        long double sum2 = 0.0L;
    };
    auto shards = run_sharded<Acc>(n_samples, threads, [&](long long i, Acc& acc) {
        const auto v = statistic(sample_seed(seed, static_cast<std::uint64_t>(i)));
        if (!v.has_value()) {
            ++acc.dropped;
            return;
        }
        ++acc.n;
        acc.sum += *v;
        acc.sum2 += static_cast<long double>(*v) * (*v);
    });
    Acc total;
    for (const auto& s : shards) {
        total.n += s.n;
        total.dropped += s.dropped;
        total.sum += s.sum;
        total.sum2 += s.sum2;
    }
    ScalarEstimate est;
    est.samples = total.n;
    est.dropped = total.dropped;
    if (total.n == 0) return est;
    const double n = static_cast<double>(total.n);
    est.mean = static_cast<double>(total.sum) / n;
    const double var = std::max(0.0, static_cast<double>(total.sum2) / n - est.mean * est.mean);
    est.ci95 = 1.96 * std::sqrt(var / n);
    return est;
}

} // namespace recgraph

#endif
