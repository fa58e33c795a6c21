#ifndef RECGRAPH_SAMPLERS_HPP
#define RECGRAPH_SAMPLERS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <recgraph/offspring.hpp>
#include <recgraph/rng.hpp>
#include <recgraph/tree.hpp>

namespace recgraph {

struct SampleMeta {
    std::uint64_t seed = 0;
    long long node_budget = 0;
    long long rejected_count = 0; // typical re-rooting: acceptance rejections
    long long overflow_count = 0; // typical re-rooting: size-cap overflows
    bool censored = false;        // node budget hit while growing
};

struct TreeSample {
    OrderedTree tree;
    SampleMeta meta;
};

namespace detail {

// Attach an independent GW(pi) descendant tree below v. Budget counts total
// vertices in the whole tree; exhausting it censors the growth frontier.
// A non-negative depth_cap truncates at that depth below v (flagged), which
// keeps ball-law pipelines cheap: structure beyond the ball never matters.
inline void grow_gw(OrderedTree& t, VertexId v, const OffspringLaw& pi, Rng& rng,
                    long long node_budget, bool& censored, int depth_cap = -1) {
    std::vector<std::pair<VertexId, int>> frontier{{v, 0}};
    while (!frontier.empty()) {
        const auto [u, depth] = frontier.back();
        frontier.pop_back();
        if (depth_cap >= 0 && depth >= depth_cap) {
            t.at(u).flag = VertexFlag::RadiusBoundary;
            t.at(u).children_complete = false;
            continue;
        }
        if (static_cast<long long>(t.size()) >= node_budget) {
            t.at(u).flag = VertexFlag::Censored;
            t.at(u).children_complete = false;
            censored = true;
            continue;
        }
        const long long k = pi.sample(rng.next_unit());
        for (long long i = 0; i < k; ++i) frontier.push_back({t.append_child(u), depth + 1});
    }
}

inline std::uint64_t geometric_count(double success_complement, Rng& rng) {
    // number of failures before the first success; P[N = k] = m^k (1 - m)
    std::uint64_t n = 0;
    while (rng.next_unit() < success_complement) ++n;
    return n;
}

} // namespace detail

// Ordered Galton-Watson tree with offspring law pi.
inline TreeSample sample_gw(const OffspringLaw& pi, std::uint64_t seed,
                            long long node_budget = 1'000'000, int depth_cap = -1) {
    pi.validate();
    TreeSample out;
    out.meta.seed = seed;
    out.meta.node_budget = node_budget;
    Rng rng(mix64(seed ^ 0x67574c5fULL));
    const VertexId root = out.tree.add_vertex();
    out.tree.set_root(root);
    detail::grow_gw(out.tree, root, pi, rng, node_budget, out.meta.censored, depth_cap);
    return out;
}

// Typically rooted Galton-Watson tree: geometric ancestor count with success
// probability 1 - m(pi); each ancestor reproduces with the size-biased law,
// the spine child sits in a uniform slot, everything else grows GW(pi).
inline TreeSample sample_tgwt(const OffspringLaw& pi, std::uint64_t seed,
                              long long node_budget = 1'000'000, int depth_cap = -1) {
    pi.validate();
    const double m = pi.mean();
    if (!(m < 1.0)) throw std::invalid_argument("sample_tgwt: requires m(pi) < 1");
    TreeSample out;
    out.meta.seed = seed;
    out.meta.node_budget = node_budget;
    Rng rng(mix64(seed ^ 0x7677547eULL));

    const VertexId root = out.tree.add_vertex();
    out.tree.set_root(root);
    detail::grow_gw(out.tree, root, pi, rng, node_budget, out.meta.censored, depth_cap);

    const std::uint64_t ancestors = detail::geometric_count(m, rng);
    const auto pihat = m > 0.0 ? size_biased(pi) : OffspringLaw{};
    VertexId cur = root;
    for (std::uint64_t j = 0; j < ancestors; ++j) {
        const VertexId parent = out.tree.add_vertex();
        const long long z = pihat.sample(rng.next_unit()); // >= 1
        const auto slot = rng.next_below(static_cast<std::uint64_t>(z));
        for (long long i = 0; i < z; ++i) {
            if (static_cast<std::uint64_t>(i) == slot) {
                out.tree.at(parent).children.push_back(cur);
                out.tree.at(cur).parent = parent;
            } else {
                const VertexId c = out.tree.add_vertex();
                out.tree.at(c).parent = parent;
                out.tree.at(parent).children.push_back(c);
                detail::grow_gw(out.tree, c, pi, rng, node_budget, out.meta.censored, depth_cap);
            }
        }
        cur = parent;
    }
    return out;
}

// Ordered eternal Galton-Watson tree truncated to `radius` ancestors above
// the root. Spine vertices reproduce with the size-biased law and carry the
// spine child in a uniform slot; everyone else reproduces with pi.
inline TreeSample sample_egwt(const OffspringLaw& pi, int radius, std::uint64_t seed,
                              long long node_budget = 1'000'000, int depth_cap = -1) {
    pi.validate();
    if (std::abs(pi.mean() - 1.0) > 1e-9)
        throw std::invalid_argument("sample_egwt: requires m(pi) = 1");
    if (pi.prob_of(1) >= 1.0 - 1e-12)
        throw std::invalid_argument("sample_egwt: requires pi(1) < 1");
    TreeSample out;
    out.meta.seed = seed;
    out.meta.node_budget = node_budget;
    Rng rng(mix64(seed ^ 0x367774ULL));

    const VertexId root = out.tree.add_vertex();
    out.tree.set_root(root);
    detail::grow_gw(out.tree, root, pi, rng, node_budget, out.meta.censored, depth_cap);

    const auto pihat = size_biased(pi);
    VertexId cur = root;
    for (int j = 0; j < radius; ++j) {
        const VertexId parent = out.tree.add_vertex();
        const long long z = pihat.sample(rng.next_unit());
        const auto slot = rng.next_below(static_cast<std::uint64_t>(z));
        for (long long i = 0; i < z; ++i) {
            if (static_cast<std::uint64_t>(i) == slot) {
                out.tree.at(parent).children.push_back(cur);
                out.tree.at(cur).parent = parent;
            } else {
                const VertexId c = out.tree.add_vertex();
                out.tree.at(c).parent = parent;
                out.tree.at(parent).children.push_back(c);
                detail::grow_gw(out.tree, c, pi, rng, node_budget, out.meta.censored, depth_cap);
            }
        }
        cur = parent;
    }
    out.tree.at(cur).flag = VertexFlag::RadiusBoundary;
    out.tree.at(cur).parent_complete = false;
    return out;
}

// Bi-variate eternal Kesten tree EKT(alpha, beta): spine o_n for n in
// [-radius, radius]; i.i.d. bushes with root offspring alpha and GW(beta)
// subtrees per bush child; the spine child is youngest under ECS order, else
// in a uniform slot.
inline TreeSample sample_ekt(const OffspringLaw& alpha, const OffspringLaw& beta, int radius,
                             bool ecs, std::uint64_t seed, long long node_budget = 1'000'000,
                             int depth_cap = -1) {
    alpha.validate();
    beta.validate();
    if (!(beta.mean() <= 1.0 + 1e-12)) throw std::invalid_argument("sample_ekt: requires m(beta) <= 1");
    if (radius < 1) throw std::invalid_argument("sample_ekt: radius >= 1");
    TreeSample out;
    out.meta.seed = seed;
    out.meta.node_budget = node_budget;
    Rng rng(mix64(seed ^ 0x3564b7ULL));
    OrderedTree& t = out.tree;

    const VertexId top = t.add_vertex();
    t.at(top).on_spine = true;
    t.at(top).parent_complete = false;
    t.at(top).flag = VertexFlag::RadiusBoundary;

    auto grow_bush_children = [&](VertexId spine_v) {
        const long long a = alpha.sample(rng.next_unit());
        for (long long i = 0; i < a; ++i) {
            const VertexId c = t.append_child(spine_v);
            detail::grow_gw(t, c, beta, rng, node_budget, out.meta.censored, depth_cap);
        }
        return a;
    };

    VertexId cur = top;
    grow_bush_children(top);
    for (int n = radius - 1; n >= -radius; --n) {
        // attach the next spine vertex below `cur`
        const auto& kids = t.at(cur).children;
        std::size_t slot = kids.size(); // youngest
        if (!ecs) slot = static_cast<std::size_t>(rng.next_below(kids.size() + 1));
        const VertexId next = t.add_child(cur, slot);
        t.at(next).on_spine = true;
        grow_bush_children(next);
        if (n == 0) t.set_root(next);
        cur = next;
    }
    t.at(cur).flag = VertexFlag::RadiusBoundary; // spine child below is truncated
    t.at(cur).children_complete = false;
    return out;
}

// Size-biased resampling with a hard cap followed by a uniform re-root: only
// the distinguished vertex moves. `sampler(seed)` must yield finite trees.
template <class Sampler>
inline TreeSample typical_reroot(Sampler&& sampler, std::uint64_t seed, long long size_cap) {
    if (size_cap < 1) throw std::invalid_argument("typical_reroot: size_cap >= 1");
    SampleMeta meta;
    meta.seed = seed;
    Rng rng(mix64(seed ^ 0x726572f7ULL));
    for (std::uint64_t attempt = 0;; ++attempt) {
        OrderedTree t = sampler(hash2(seed ^ 0x7472ULL, attempt));
        const auto n = static_cast<long long>(t.size());
        if (n > size_cap) {
            ++meta.overflow_count;
            continue;
        }
        if (rng.next_unit() * static_cast<double>(size_cap) >= static_cast<double>(n)) {
            ++meta.rejected_count;
            continue;
        }
        const auto pick = static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n)));
        t.set_root(pick);
        return TreeSample{std::move(t), meta};
    }
}

// Unimodularised ECS-ordered EKT(alpha, beta): the root bush is drawn
// size-biased with a uniform re-root, surrounding bushes are i.i.d.
inline TreeSample unimodularised_ekt(const OffspringLaw& alpha, const OffspringLaw& beta,
                                     int radius, std::uint64_t seed, long long size_cap = 4096,
                                     long long node_budget = 1'000'000, int depth_cap = -1) {
    alpha.validate();
    beta.validate();
    if (!(beta.mean() < 1.0)) throw std::invalid_argument("unimodularised_ekt: requires m(beta) < 1");
    if (radius < 1) throw std::invalid_argument("unimodularised_ekt: radius >= 1");

    // single bush: root with alpha children, each carrying GW(beta)
    auto bush_sampler = [&](std::uint64_t s) {
        OrderedTree t;
        Rng rng(mix64(s ^ 0x62757368ULL));
        const VertexId r = t.add_vertex();
        t.set_root(r);
        bool censored = false;
        const long long a = alpha.sample(rng.next_unit());
        for (long long i = 0; i < a; ++i) {
            const VertexId c = t.append_child(r);
            detail::grow_gw(t, c, beta, rng, node_budget, censored);
        }
        return t;
    };

    TreeSample rooted_bush = typical_reroot(bush_sampler, hash2(seed, 0xb00571ULL), size_cap);
    rooted_bush.meta.seed = seed;
    rooted_bush.meta.node_budget = node_budget;

    TreeSample out;
    out.meta = rooted_bush.meta;
    Rng rng(mix64(seed ^ 0x756b6574ULL));
    OrderedTree& t = out.tree;

    const VertexId top = t.add_vertex();
    t.at(top).on_spine = true;
    t.at(top).parent_complete = false;
    t.at(top).flag = VertexFlag::RadiusBoundary;

    auto grow_bush_children = [&](VertexId spine_v) {
        const long long a = alpha.sample(rng.next_unit());
        for (long long i = 0; i < a; ++i) {
            const VertexId c = t.append_child(spine_v);
            detail::grow_gw(t, c, beta, rng, node_budget, out.meta.censored, depth_cap);
        }
    };

    // bushes above the root bush: o_radius .. o_1
    VertexId cur = top;
    grow_bush_children(top);
    for (int n = radius - 1; n >= 1; --n) {
        const VertexId next = t.add_child(cur, t.at(cur).children.size()); // ECS: youngest
        t.at(next).on_spine = true;
        grow_bush_children(next);
        cur = next;
    }

    // splice in the re-rooted bush as bush 0: its structural top becomes o_0
    const VertexId offset = static_cast<VertexId>(t.size());
    const OrderedTree& rb = rooted_bush.tree;
    for (std::size_t i = 0; i < rb.size(); ++i) {
        const VertexId nv = t.add_vertex();
        t.at(nv) = rb.at(static_cast<VertexId>(i));
        t.at(nv).parent = rb.at(static_cast<VertexId>(i)).parent == kNoVertex
                              ? kNoVertex
                              : rb.at(static_cast<VertexId>(i)).parent + offset;
        auto& kids = t.at(nv).children;
        for (auto& k : kids) k += offset;
    }
    const VertexId bush_top = rb.top() + offset;
    t.at(bush_top).on_spine = true;
    if (radius >= 1) {
        t.at(bush_top).parent = cur;
        t.at(cur).children.push_back(bush_top); // ECS: youngest under o_1
    } else {
        t.at(bush_top).parent_complete = false;
        t.at(bush_top).flag = VertexFlag::RadiusBoundary;
    }
    t.set_root(rb.root() + offset);

    // bushes below: o_{-1} .. o_{-radius}
    cur = bush_top;
    for (int n = -1; n >= -radius; --n) {
        const VertexId next = t.add_child(cur, t.at(cur).children.size());
        t.at(next).on_spine = true;
        grow_bush_children(next);
        cur = next;
    }
    t.at(cur).flag = VertexFlag::RadiusBoundary;
    t.at(cur).children_complete = false;
    return out;
}

} // namespace recgraph

#endif
