#ifndef RECGRAPH_CODEC_HPP
#define RECGRAPH_CODEC_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include <recgraph/explore.hpp>
#include <recgraph/tree.hpp>

namespace recgraph {

// Offspring-count code along a succession line: values y_n >= -1 for
// n in [lo, lo + size).
struct CodeSequence {
    long long lo = 0;
    std::vector<long long> values;

    long long hi() const { return lo + static_cast<long long>(values.size()); }
    long long at(long long n) const {
        if (n < lo || n >= hi()) throw std::out_of_range("CodeSequence::at");
        return values[static_cast<std::size_t>(n - lo)];
    }
};

struct PhiResult {
    bool ok = false;
    CodeSequence code;
    // nearest unresolved y-index below / above the emitted range, if any
    std::optional<long long> censored_below;
    std::optional<long long> censored_above;
    // first unresolved index overall (the spec's CensoredWindow payload)
    std::optional<long long> censored_at;
};

// Backward map: y_n = d_1(u_{n+1}) - 1 along the succession line through o
// (u_0 = o). Emits the contiguous run of resolved child counts containing the
// origin; a genuinely finite line just shortens the code, while censoring is
// reported with the nearest unresolved indices.
inline PhiResult phi_R(const OrderedTree& t, VertexId o, std::size_t n_back, std::size_t n_fwd) {
    const auto win = succession_window(t, o, n_back, n_fwd);
    PhiResult out;
    // u_m for m in [-(#back), #fwd]; y_n needs u_{n+1}: n in [-#back-1, #fwd-1]
    const long long first_u = -static_cast<long long>(win.origin_index);
    auto y_index_of = [&](std::size_t line_idx) {
        return first_u + static_cast<long long>(line_idx) - 1;
    };
    auto complete = [&](std::size_t i) { return t.at(win.line[i]).children_complete; };

    if (!complete(win.origin_index)) {
        out.censored_at = y_index_of(win.origin_index);
        out.censored_below = out.censored_at;
        out.code.lo = y_index_of(win.origin_index);
        return out;
    }
    std::size_t a_idx = win.origin_index;
    while (a_idx > 0 && complete(a_idx - 1)) --a_idx;
    std::size_t b_idx = win.origin_index;
    while (b_idx + 1 < win.line.size() && complete(b_idx + 1)) ++b_idx;

    out.code.lo = y_index_of(a_idx);
    for (std::size_t i = a_idx; i <= b_idx; ++i)
        out.code.values.push_back(static_cast<long long>(t.d1(win.line[i])) - 1);

    const bool low_cut = a_idx > 0 || win.back_censored;
    const bool high_cut = b_idx + 1 < win.line.size() || win.fwd_censored;
    if (low_cut) out.censored_below = out.code.lo - 1;
    if (high_cut) out.censored_above = out.code.hi();
    out.censored_at = out.censored_below ? out.censored_below : out.censored_above;
    out.ok = !low_cut && !high_cut;
    return out;
}

// Forward map: record component of 0 for the window y, boundary-flagged where
// the window ends. Labels carry lattice positions.
inline OrderedTree psi_R(const CodeSequence& y, long long node_budget = 1'000'000) {
    for (long long v : y.values)
        if (v < -1) throw std::invalid_argument("psi_R: code values must be >= -1");
    auto w = deterministic_window(y.values, y.lo);
    ExploreOptions opts;
    opts.node_budget = node_budget;
    const int radius = static_cast<int>(y.values.size()) + 2;
    return component_ball(w, radius, opts).tree;
}

struct CodeCheckReport {
    bool pass = false;
    long long total = 0;
    // first k (1-based, in RLS order) whose prefix sum fails to stay negative
    std::optional<std::size_t> violating_prefix;
};

// Finite-tree coding sums: over the RLS order, prefix sums of d1 - 1 stay
// negative and the total is exactly -1.
inline CodeCheckReport finite_code_check(const OrderedTree& t) {
    CodeCheckReport rep;
    if (t.empty()) return rep;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto v = static_cast<VertexId>(i);
        if (!t.at(v).children_complete || t.at(v).flag != VertexFlag::Interior)
            throw std::invalid_argument("finite_code_check: tree must be fully resolved");
    }
    const auto order = rls_sort(t);
    long long acc = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        acc += static_cast<long long>(t.d1(order[k])) - 1;
        if (acc >= 0 && k + 1 < order.size() && !rep.violating_prefix)
            rep.violating_prefix = k + 1;
    }
    rep.total = acc;
    rep.pass = acc == -1 && !rep.violating_prefix;
    return rep;
}

struct RoundTripReport {
    long long matched = 0;
    long long mismatched = 0;
    long long censored = 0; // indices excluded for lack of resolution
};

// Zero-mean identity: the component of 0 rebuilt from the window recodes to
// y with y_k = x_k on every resolved index in [-n, n). The rebuilt window is
// `window_factor` times wider than the asserted range, so the censored
// fraction shrinks as the factor grows.
inline RoundTripReport roundtrip_check(TrajectoryWindow& w, long long n,
                                       long long node_budget = 1'000'000,
                                       long long window_factor = 8) {
    RoundTripReport rep;
    const long long wide = n * std::max<long long>(window_factor, 1);
    if (!w.ensure_index(wide - 1) || !w.ensure_index(-wide)) {
        rep.censored = 2 * n;
        return rep;
    }
    std::vector<long long> xs;
    xs.reserve(static_cast<std::size_t>(2 * wide));
    for (long long k = -wide; k < wide; ++k) xs.push_back(w.x(k));
    CodeSequence input{-wide, xs};
    const OrderedTree tree = psi_R(input, node_budget);

    // locate vertex 0 and walk the succession line both ways
    VertexId origin = kNoVertex;
    for (std::size_t i = 0; i < tree.size(); ++i)
        if (tree.at(static_cast<VertexId>(i)).label == 0) origin = static_cast<VertexId>(i);
    if (origin == kNoVertex) {
        rep.censored = 2 * n;
        return rep;
    }
    // every emitted code value is valid (censoring truncates emission, it
    // never corrupts emitted values)
    const auto phi = phi_R(tree, origin, static_cast<std::size_t>(2 * wide),
                           static_cast<std::size_t>(2 * wide));
    for (long long k = phi.code.lo; k < phi.code.hi(); ++k) {
        if (k < -n || k >= n) continue;
        if (phi.code.at(k) == w.x(k))
            ++rep.matched;
        else
            ++rep.mismatched;
    }
    rep.censored = 2 * n - rep.matched - rep.mismatched;
    return rep;
}

} // namespace recgraph

#endif
