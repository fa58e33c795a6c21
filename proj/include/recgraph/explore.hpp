#ifndef RECGRAPH_EXPLORE_HPP
#define RECGRAPH_EXPLORE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <optional>
#include <vector>

#include <recgraph/recorder.hpp>
#include <recgraph/tree.hpp>

namespace recgraph {

struct BallMeta {
    long long heuristic_spine = 0;    // vertices resolved as spine via the horizon
    long long no_parent_heuristic = 0; // parentless tops declared via the forward cap
    long long censored_vertices = 0;
    bool fully_resolved = true; // no Censored flags anywhere in the ball
};

struct BallResult {
    OrderedTree tree;
    VertexId root = kNoVertex;
    BallMeta meta;
};

namespace detail {

struct ParentScanOut {
    enum class Kind : std::uint8_t { Found, CapNoParent, Censored } kind = Kind::Censored;
    long long pos = 0;
};

inline ParentScanOut parent_scan(TrajectoryWindow& w, long long i, const ExploreOptions& opts,
                                 bool strict) {
    if (!w.ensure_index(i)) return {ParentScanOut::Kind::Censored, 0};
    const long long si = w.sum(i);
    long long n = i + 1;
    long long steps = 0;
    while (true) {
        if (!w.ensure_index(n - 1)) return {ParentScanOut::Kind::Censored, 0};
        const long long sn = w.sum(n);
        if (strict ? (sn > si) : (sn >= si)) return {ParentScanOut::Kind::Found, n};
        ++n;
        ++steps;
        if (opts.no_parent_cap && steps >= *opts.no_parent_cap)
            return {ParentScanOut::Kind::CapNoParent, 0};
    }
}

// Left reach of a vertex: the leftmost position its stored children can
// occupy. Drop case: L(i); spine case: l(i).
struct ReachOut {
    enum class Kind : std::uint8_t { Drop, Spine, Censored } kind = Kind::Censored;
    long long reach = 0;   // L(i) or l(i)
    long long type = -1;   // t(i)
    bool heuristic = false;
};

inline ReachOut left_reach(TrajectoryWindow& w, long long i, const ExploreOptions& opts,
                           bool strict) {
    if (strict) {
        // Strict-record variant: reach = (last m with S_m >= S_i) + 1.
        if (!w.ensure_index(i - 1)) return {};
        const long long si = w.sum(i);
        long long m = i - 1;
        while (true) {
            if (!w.ensure_index(m)) return {};
            if (w.sum(m) >= si) return {ReachOut::Kind::Drop, m + 1, -1, false};
            --m;
        }
    }
    const auto scan = left_scan(w, i, opts);
    switch (scan.kind) {
        case LeftScan::Kind::FoundDrop: return {ReachOut::Kind::Drop, scan.L, -1, false};
        case LeftScan::Kind::CertSpine: return {ReachOut::Kind::Spine, scan.l, scan.type, false};
        case LeftScan::Kind::HeurSpine: return {ReachOut::Kind::Spine, scan.l, scan.type, true};
        case LeftScan::Kind::Censored: break;
    }
    return {};
}

// Parent map of the record graph restricted to [a, b]: one monotonic-stack
// pass. parent[j-a] = next n > j with S_n >= S_j (strict: >), -1 when the
// record lies beyond b. Children lists come out eldest-first. A second stack
// yields prev_exceed[j-a]: the last m < j in [a, j) with S_m > S_j (>= when
// strict), which certifies the left reach L(j) = prev_exceed + 1 whenever it
// exists in-window.
struct IntervalStructure {
    long long a = 0, b = 0;
    std::vector<long long> parent;                // index j-a, -1 = beyond b
    std::vector<std::vector<long long>> children; // positions, eldest first
    std::vector<long long> prev_exceed;           // index j-a, LLONG_MIN = none in window

    bool reach_resolved(long long j) const {
        return prev_exceed[static_cast<std::size_t>(j - a)] != std::numeric_limits<long long>::min();
    }
};

inline IntervalStructure interval_structure(const TrajectoryWindow& w, long long a, long long b,
                                            bool strict) {
    IntervalStructure out;
    out.a = a;
    out.b = b;
    const auto len = static_cast<std::size_t>(b - a + 1);
    out.parent.assign(len, -1);
    out.children.assign(len, {});
    out.prev_exceed.assign(len, std::numeric_limits<long long>::min());
    std::vector<long long> stack;       // next-record stack
    std::vector<long long> high_stack;  // prev-exceed stack, S strictly decreasing
    for (long long n = a; n <= b; ++n) {
        const long long sn = w.sum(n);
        while (!stack.empty()) {
            const long long j = stack.back();
            const long long sj = w.sum(j);
            const bool popped = strict ? (sj < sn) : (sj <= sn);
            if (!popped) break;
            out.parent[static_cast<std::size_t>(j - a)] = n;
            out.children[static_cast<std::size_t>(n - a)].push_back(j);
            stack.pop_back();
        }
        stack.push_back(n);
        while (!high_stack.empty()) {
            const long long sj = w.sum(high_stack.back());
            const bool still_higher = strict ? (sj >= sn) : (sj > sn);
            if (still_higher) break;
            high_stack.pop_back();
        }
        if (!high_stack.empty()) out.prev_exceed[static_cast<std::size_t>(n - a)] = high_stack.back();
        high_stack.push_back(n);
    }
    return out;
}

} // namespace detail

// Ball of graph-distance <= radius around position 0 in the record graph
// (kind Record / StrictRecord). Parents found by forward scans, the interior
// by one stack pass over the union of descendant intervals. Censoring is
// recorded per vertex, never coerced; window-edge censoring still reports the
// partial child lists that are certain.
inline BallResult record_ball(TrajectoryWindow& w, int radius, const ExploreOptions& opts = {},
                              bool strict = false) {
    BallResult result;
    BallMeta& meta = result.meta;

    // 1. Ancestor chain 0 = a_0, a_1, ..., a_K, K <= radius.
    std::vector<long long> chain{0};
    bool top_censored = false;
    bool top_is_root = false; // forward cap says: no parent
    while (static_cast<int>(chain.size()) - 1 < radius) {
        const auto ps = detail::parent_scan(w, chain.back(), opts, strict);
        if (ps.kind == detail::ParentScanOut::Kind::Found) {
            chain.push_back(ps.pos);
        } else if (ps.kind == detail::ParentScanOut::Kind::CapNoParent) {
            top_is_root = true;
            ++meta.no_parent_heuristic;
            break;
        } else {
            top_censored = true;
            break;
        }
    }
    const auto K = static_cast<long long>(chain.size()) - 1;

    // 2. Left reaches for every chain vertex that needs children (distance
    //    < radius). Spine resolutions (certificate or horizon) bound the
    //    children of path vertices; a censored reach falls back to whatever
    //    part of the window is materialized, yielding partial child lists.
    const long long expand_upto = std::min<long long>(K, radius - 1);
    std::vector<detail::ReachOut> reach;
    long long bound = 0;
    bool any_reach_censored = false;
    std::vector<long long> spine_descents; // spine path below 0, top first
    std::set<long long> spine_bounded;     // spine vertices with known child bounds
    if (radius > 0) {
        reach.resize(static_cast<std::size_t>(expand_upto) + 1);
        for (long long k = 0; k <= expand_upto; ++k) {
            auto& r = reach[static_cast<std::size_t>(k)];
            r = detail::left_reach(w, chain[static_cast<std::size_t>(k)], opts, strict);
            if (r.kind == detail::ReachOut::Kind::Censored) {
                any_reach_censored = true;
                break; // deeper ancestors would censor on the same window edge
            }
            if (r.heuristic) ++meta.heuristic_spine;
            if (r.kind == detail::ReachOut::Kind::Spine)
                spine_bounded.insert(chain[static_cast<std::size_t>(k)]);
            bound = std::min(bound, r.reach);
        }
        // Spine descents below 0: each spine vertex's youngest child is the
        // next rightmost argmax; the one at distance `radius` is a frontier.
        if (!strict && !reach.empty() && reach[0].kind == detail::ReachOut::Kind::Spine) {
            long long cur = reach[0].reach; // l(0)
            spine_descents.push_back(cur);
            for (int depth = 2; depth <= radius; ++depth) {
                const auto r = detail::left_reach(w, cur, opts, strict);
                if (r.kind == detail::ReachOut::Kind::Spine) {
                    if (r.heuristic) ++meta.heuristic_spine;
                    spine_bounded.insert(cur);
                    cur = r.reach;
                    spine_descents.push_back(cur);
                } else if (r.kind == detail::ReachOut::Kind::Drop) {
                    // the descent leaves the spine: finite reach from here
                    bound = std::min(bound, r.reach);
                    break;
                } else {
                    any_reach_censored = true;
                    break;
                }
            }
            if (!spine_descents.empty()) bound = std::min(bound, spine_descents.back());
        }
        if (any_reach_censored) bound = std::min(bound, w.lo());
    }

    // 3. Stack pass over [fabric_lo, a_K]. One step below `bound` so the
    //    blocker that certifies the smallest left reach is inside the
    //    interval (left scans materialized it already).
    const long long top = chain.back();
    std::optional<detail::IntervalStructure> fabric;
    if (radius > 0) {
        const long long fabric_lo = std::max(bound - 1, w.lo());
        fabric = detail::interval_structure(w, fabric_lo, top, strict);
    }

    // 4. BFS assembly out to `radius`.
    OrderedTree& t = result.tree;
    std::map<long long, VertexId> ids;
    auto get_vertex = [&](long long pos) {
        auto it = ids.find(pos);
        if (it != ids.end()) return it->second;
        const VertexId v = t.add_vertex();
        t.at(v).label = pos;
        ids.emplace(pos, v);
        return v;
    };

    struct Item {
        long long pos;
        int dist;
    };
    std::vector<Item> queue{{0, 0}};
    const VertexId root = get_vertex(0);
    result.root = root;
    t.set_root(root);
    std::size_t qi = 0;
    long long nodes = 1;

    auto chain_index = [&](long long pos) -> long long {
        for (std::size_t k = 0; k < chain.size(); ++k)
            if (chain[k] == pos) return static_cast<long long>(k);
        return -1;
    };

    auto mark_censored = [&](VertexId v) {
        if (t.at(v).flag != VertexFlag::Censored) {
            t.at(v).flag = VertexFlag::Censored;
            ++meta.censored_vertices;
        }
        meta.fully_resolved = false;
    };

    while (qi < queue.size()) {
        const auto [pos, dist] = queue[qi++];
        const VertexId v = get_vertex(pos);
        if (dist >= radius) {
            t.at(v).flag = VertexFlag::RadiusBoundary;
            t.at(v).children_complete = false;
            if (t.at(v).parent == kNoVertex) t.at(v).parent_complete = false;
            continue;
        }

        // parent edge
        const long long ci = chain_index(pos);
        long long parent_pos = -1;
        bool parent_known = false;
        bool parentless = false;
        if (ci >= 0 && ci < K) {
            parent_pos = chain[static_cast<std::size_t>(ci + 1)];
            parent_known = true;
        } else if (ci == K) {
            // dist < radius here, so the chain ended early: either the
            // forward cap declared this a root, or the scan censored.
            if (top_is_root) {
                parentless = true;
                parent_known = true;
            }
        } else if (fabric && pos >= fabric->a && pos <= fabric->b) {
            const long long p = fabric->parent[static_cast<std::size_t>(pos - fabric->a)];
            if (p >= 0) {
                parent_pos = p;
                parent_known = true;
            }
        }
        if (!parent_known && t.at(v).parent != kNoVertex) parent_known = true; // linked by expansion
        if (parent_known && !parentless && t.at(v).parent == kNoVertex) {
            const VertexId pv = get_vertex(parent_pos);
            t.at(v).parent = pv;
            if (std::find(t.at(pv).children.begin(), t.at(pv).children.end(), v) ==
                t.at(pv).children.end()) {
                // covers the case where the parent sits at the radius edge;
                // expanded parents rebuild their lists below
                t.at(pv).children.push_back(v);
            }
            if (std::none_of(queue.begin(), queue.end(),
                             [&](const Item& it) { return it.pos == parent_pos; }))
                queue.push_back({parent_pos, dist + 1});
        } else if (!parent_known && !parentless) {
            t.at(v).parent_complete = false;
            mark_censored(v);
        }

        // children edges
        if (fabric && pos >= fabric->a && pos <= fabric->b) {
            const auto& kid_positions = fabric->children[static_cast<std::size_t>(pos - fabric->a)];
            std::vector<VertexId> kids;
            kids.reserve(kid_positions.size());
            for (long long cpos : kid_positions) {
                const VertexId cv = get_vertex(cpos); // may reallocate vertex storage
                t.at(cv).parent = v;
                kids.push_back(cv);
                if (std::none_of(queue.begin(), queue.end(),
                                 [&](const Item& it) { return it.pos == cpos; }))
                    queue.push_back({cpos, dist + 1});
            }
            t.at(v).children = std::move(kids);
            const bool no_descendants = w.contains(pos - 1) && w.x(pos - 1) < 0;
            const bool complete = no_descendants || fabric->reach_resolved(pos) ||
                                  spine_bounded.count(pos) > 0;
            t.at(v).children_complete = complete;
            if (!complete) {
                // missing children all sit below the window: a valid prefix
                t.at(v).eldest_prefix = true;
                mark_censored(v);
            }
        } else {
            t.at(v).children_complete = false;
            mark_censored(v);
        }

        if (nodes > opts.node_budget) {
            mark_censored(v);
            // everything still queued is unresolved
            for (std::size_t r = qi; r < queue.size(); ++r) {
                const VertexId uv = get_vertex(queue[r].pos);
                t.at(uv).children_complete = false;
                mark_censored(uv);
            }
            break;
        }
        ++nodes;
    }

    // spine marks: chain vertices and descents with spine-certified reaches
    for (long long pos : spine_bounded) {
        auto it = ids.find(pos);
        if (it != ids.end()) t.at(it->second).on_spine = true;
    }
    if (!spine_descents.empty()) {
        auto it = ids.find(spine_descents.back());
        if (it != ids.end()) t.at(it->second).on_spine = true;
    }

    return result;
}

inline BallResult component_ball(TrajectoryWindow& w, int radius, const ExploreOptions& opts = {}) {
    return record_ball(w, radius, opts, /*strict=*/false);
}

// Climbing-point ball: C(i) is the first future position attaining the
// running future minimum; membership is certified by a non-improvement run of
// `climb_confirm` steps.
inline BallResult climbing_ball(TrajectoryWindow& w, int radius, const ExploreOptions& opts = {});

inline BallResult shift_graph_ball(TrajectoryWindow& w, VertexShiftKind kind, int radius,
                                   const ExploreOptions& opts = {}) {
    switch (kind) {
        case VertexShiftKind::Record: return record_ball(w, radius, opts, false);
        case VertexShiftKind::StrictRecord: return record_ball(w, radius, opts, true);
        case VertexShiftKind::ClimbingPoint: return climbing_ball(w, radius, opts);
    }
    throw std::logic_error("shift_graph_ball: bad kind");
}

// ---------------------------------------------------------------------------
// Foil partition: u ~ v iff F^n(u) = F^n(v) for some n >= 1 with both
// iterates defined. On a finite stored tree this groups vertices by depth
// below the structural top. Boundary/censored vertices are excluded.
inline std::vector<std::vector<VertexId>> foil_partition(const OrderedTree& t) {
    std::map<std::size_t, std::vector<VertexId>> by_depth;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto v = static_cast<VertexId>(i);
        if (t.at(v).flag != VertexFlag::Interior) continue;
        by_depth[t.depth_below_top(v)].push_back(v);
    }
    std::vector<std::vector<VertexId>> out;
    out.reserve(by_depth.size());
    for (auto& [d, vs] : by_depth) out.push_back(std::move(vs));
    return out;
}

// ---------------------------------------------------------------------------
// Desk-scale phase classification. Heuristics with explicit horizons; the
// acceptance suite uses them statistically.
enum class ExplorationClass : std::uint8_t {
    FiniteComponentCertified,
    SpineEvidence,
    AllDescendantsFiniteEvidence,
    Inconclusive,
};

struct ClassifyReport {
    ExplorationClass cls = ExplorationClass::Inconclusive;
    long long horizon = 0;
    long long ancestors_examined = 0;
    long long future_max_pos = 0;
    long long future_max_value = 0;
};

inline ClassifyReport classify_exploration(TrajectoryWindow& w, long long horizon,
                                           const ExploreOptions& opts = {}) {
    if (horizon < 1) throw std::invalid_argument("classify_exploration: horizon >= 1 required");
    ClassifyReport rep;
    rep.horizon = horizon;

    // 1. Future-maximum certificate: last argmax over [0, horizon], then a
    //    confirmation run strictly below it. The run is a multiple of the
    //    horizon: null-recurrent walks revisit their running maximum on the
    //    same scale, so a short run would certify far too often at mean zero.
    const long long confirm = std::max<long long>(4 * horizon, 64);
    long long maxv = std::numeric_limits<long long>::min();
    long long maxpos = 0;
    bool window_ok = true;
    for (long long n = 0; n <= horizon; ++n) {
        if (!w.ensure_index(n)) {
            window_ok = false;
            break;
        }
        const long long s = w.sum(n);
        if (s >= maxv) {
            maxv = s;
            maxpos = n;
        }
    }
    rep.future_max_pos = maxpos;
    rep.future_max_value = maxv;
    if (window_ok) {
        bool confirmed = true;
        for (long long n = horizon + 1; n <= horizon + confirm; ++n) {
            if (!w.ensure_index(n)) {
                confirmed = false;
                window_ok = false;
                break;
            }
            if (w.sum(n) >= maxv) {
                confirmed = false;
                break;
            }
        }
        if (confirmed) {
            rep.cls = ExplorationClass::FiniteComponentCertified;
            return rep;
        }
    }

    // 2. Ancestors within a short prefix, each left-scanned over the full
    //    horizon. An ancestor whose past stays at or below its level is spine
    //    evidence; if every one of them resolves L, all descendant sets
    //    observed are finite.
    const long long ancestor_cap = std::max<long long>(horizon / 100, 16);
    std::vector<long long> ancestors{0};
    {
        long long cur = 0;
        while (true) {
            ExploreOptions ps_opts;
            ps_opts.no_parent_cap = horizon;
            const auto ps = detail::parent_scan(w, cur, ps_opts, false);
            if (ps.kind != detail::ParentScanOut::Kind::Found || ps.pos > ancestor_cap) break;
            ancestors.push_back(ps.pos);
            cur = ps.pos;
        }
    }
    rep.ancestors_examined = static_cast<long long>(ancestors.size());

    bool all_resolved = true;
    bool any_censored = false;
    for (auto it = ancestors.rbegin(); it != ancestors.rend(); ++it) {
        const long long i = *it;
        const long long si = w.sum(i);
        bool drop_found = false;
        bool censored = false;
        for (long long m = i - 1; m >= i - horizon; --m) {
            if (!w.ensure_index(m)) {
                censored = true;
                break;
            }
            if (w.sum(m) > si) {
                drop_found = true;
                break;
            }
        }
        if (censored) {
            any_censored = true;
            all_resolved = false;
            continue;
        }
        if (!drop_found) {
            rep.cls = ExplorationClass::SpineEvidence;
            return rep;
        }
    }
    if (all_resolved) {
        rep.cls = ExplorationClass::AllDescendantsFiniteEvidence;
        return rep;
    }
    rep.cls = any_censored ? ExplorationClass::Inconclusive
                           : ExplorationClass::AllDescendantsFiniteEvidence;
    return rep;
}

// ---------------------------------------------------------------------------
// Climbing-point ball implementation.

inline BallResult climbing_ball(TrajectoryWindow& w, int radius, const ExploreOptions& opts) {
    BallResult result;
    BallMeta& meta = result.meta;
    OrderedTree& t = result.tree;

    // Ancestor chain by iterated climbing.
    std::vector<long long> chain{0};
    bool top_censored = false;
    while (static_cast<int>(chain.size()) - 1 < radius) {
        const auto c = climbing_of(w, chain.back(), opts);
        if (!c.resolved()) {
            top_censored = true;
            break;
        }
        chain.push_back(c.value);
    }
    const long long top = chain.back();

    // Children of i are the contiguous run of j < i whose first future
    // argmin is i. Walk down per expandable vertex using suffix minima over
    // the materialized window.
    const long long b = top + opts.climb_confirm;
    if (!w.ensure_index(b)) top_censored = true;

    std::map<long long, VertexId> ids;
    auto get_vertex = [&](long long pos) {
        auto it = ids.find(pos);
        if (it != ids.end()) return it->second;
        const VertexId v = t.add_vertex();
        t.at(v).label = pos;
        ids.emplace(pos, v);
        return v;
    };

    // first_argmin_after(j): smallest k > j with S_k = min{S_n : n in (j, b]},
    // certified when k + climb_confirm <= b.
    auto first_argmin_after = [&](long long j) -> std::optional<long long> {
        long long best = std::numeric_limits<long long>::max();
        long long best_pos = -1;
        for (long long n = j + 1; n <= b; ++n) {
            if (!w.ensure_index(n)) return std::nullopt;
            const long long s = w.sum(n);
            if (s < best) {
                best = s;
                best_pos = n;
            }
        }
        if (best_pos < 0 || best_pos + opts.climb_confirm > b) return std::nullopt;
        return best_pos;
    };

    struct Item {
        long long pos;
        int dist;
    };
    std::vector<Item> queue{{0, 0}};
    const VertexId root = get_vertex(0);
    result.root = root;
    t.set_root(root);
    std::size_t qi = 0;

    auto chain_index = [&](long long pos) -> long long {
        for (std::size_t k = 0; k < chain.size(); ++k)
            if (chain[k] == pos) return static_cast<long long>(k);
        return -1;
    };

    while (qi < queue.size()) {
        const auto [pos, dist] = queue[qi++];
        const VertexId v = get_vertex(pos);
        if (dist >= radius) {
            t.at(v).flag = VertexFlag::RadiusBoundary;
            t.at(v).children_complete = false;
            if (t.at(v).parent == kNoVertex) t.at(v).parent_complete = false;
            continue;
        }
        // parent
        const long long ci = chain_index(pos);
        std::optional<long long> parent_pos;
        if (ci >= 0 && ci + 1 < static_cast<long long>(chain.size()))
            parent_pos = chain[static_cast<std::size_t>(ci + 1)];
        else if (ci < 0)
            parent_pos = first_argmin_after(pos);
        else if (top_censored) {
            t.at(v).flag = VertexFlag::Censored;
            t.at(v).parent_complete = false;
            ++meta.censored_vertices;
            meta.fully_resolved = false;
        }
        if (parent_pos) {
            const VertexId pv = get_vertex(*parent_pos);
            if (t.at(v).parent == kNoVertex) {
                t.at(v).parent = pv;
                if (std::find(t.at(pv).children.begin(), t.at(pv).children.end(), v) ==
                    t.at(pv).children.end())
                    t.at(pv).children.push_back(v);
            }
            if (std::none_of(queue.begin(), queue.end(),
                             [&](const Item& it) { return it.pos == *parent_pos; }))
                queue.push_back({*parent_pos, dist + 1});
        } else if (ci < 0 && t.at(v).parent == kNoVertex) {
            t.at(v).flag = VertexFlag::Censored;
            t.at(v).parent_complete = false;
            ++meta.censored_vertices;
            meta.fully_resolved = false;
        }
        // children: contiguous run below pos
        std::vector<VertexId> kids;
        bool censored_children = false;
        for (long long j = pos - 1;; --j) {
            const auto cj = first_argmin_after(j);
            if (!cj) {
                censored_children = true;
                break;
            }
            if (*cj != pos) break;
            const VertexId cv = get_vertex(j); // may reallocate vertex storage
            t.at(cv).parent = v;
            kids.push_back(cv);
            if (std::none_of(queue.begin(), queue.end(),
                             [&](const Item& it) { return it.pos == j; }))
                queue.push_back({j, dist + 1});
        }
        t.at(v).children = std::move(kids);
        if (censored_children) {
            t.at(v).flag = VertexFlag::Censored;
            t.at(v).children_complete = false;
            t.at(v).eldest_prefix = true; // the run was walked eldest-first
            ++meta.censored_vertices;
            meta.fully_resolved = false;
        } else {
            t.at(v).children_complete = true;
        }
        if (static_cast<long long>(t.size()) > opts.node_budget) {
            meta.fully_resolved = false;
            break;
        }
    }

    // Climbing spine: successive future minima from any position; the chain
    // vertices all lie on the bi-infinite path when the drift is positive.
    for (long long pos : chain) {
        auto it = ids.find(pos);
        if (it != ids.end()) t.at(it->second).on_spine = true;
    }
    return result;
}

} // namespace recgraph

#endif
