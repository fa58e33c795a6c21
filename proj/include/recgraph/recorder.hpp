#ifndef RECGRAPH_RECORDER_HPP
#define RECGRAPH_RECORDER_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include <recgraph/increments.hpp>
#include <recgraph/tree.hpp>

namespace recgraph {

enum class CensorReason : std::uint8_t { WindowBudget, NodeBudget };

// Outcome of a scan-based query on a stochastic window. ProvedInfinite is
// only emitted with a finite certificate (generator-level, e.g. the queue
// chain's stationary barrier); plain scans censor instead. `heuristic` marks
// values resolved through an explicit spine horizon rather than a proof.
template <class V>
struct Resolution {
    enum class State : std::uint8_t { Resolved, ProvedInfinite, Censored };

    State state = State::Censored;
    V value{};
    CensorReason reason = CensorReason::WindowBudget;
    bool heuristic = false;
    std::optional<long long> bound; // best partial information at censoring

    bool resolved() const { return state == State::Resolved; }
    bool infinite() const { return state == State::ProvedInfinite; }
    bool censored() const { return state == State::Censored; }

    static Resolution make(V v, bool heur = false) {
        Resolution r;
        r.state = State::Resolved;
        r.value = std::move(v);
        r.heuristic = heur;
        return r;
    }
    static Resolution infinite_case(bool heur = false) {
        Resolution r;
        r.state = State::ProvedInfinite;
        r.heuristic = heur;
        return r;
    }
    static Resolution censor(CensorReason why, std::optional<long long> b = std::nullopt) {
        Resolution r;
        r.state = State::Censored;
        r.reason = why;
        r.bound = b;
        return r;
    }
};

enum class VertexShiftKind : std::uint8_t { Record, StrictRecord, ClimbingPoint };
enum class ChildMode : std::uint8_t { Formula, BruteScan };

struct ExploreOptions {
    long long node_budget = 1'000'000;
    // Forward record scans give up after this many steps and report the
    // vertex as parentless (counted in metadata). Sound only for laws whose
    // walk drifts down; leave unset otherwise.
    std::optional<long long> no_parent_cap;
    // Left scans that stay at or below the scanned maximum for this many
    // steps resolve the vertex as a spine member (t >= 0) heuristically.
    std::optional<long long> spine_horizon;
    // Confirmation run for the climbing-point shift: a future minimum is
    // accepted after this many non-improving steps.
    long long climb_confirm = 4096;
};

// ---------------------------------------------------------------------------
// Scan primitives

// R(i) = inf{n > i : S_n >= S_i} (strict: S_n > S_i).
inline Resolution<long long> record_of(TrajectoryWindow& w, long long i,
                                       const ExploreOptions& opts = {}, bool strict = false) {
    const long long si = (w.ensure_index(i), w.sum(i));
    long long n = i + 1;
    long long steps = 0;
    while (true) {
        if (!w.ensure_index(n - 1)) return Resolution<long long>::censor(CensorReason::WindowBudget);
        const long long sn = w.sum(n);
        if (strict ? (sn > si) : (sn >= si)) return Resolution<long long>::make(n);
        ++n;
        ++steps;
        if (opts.no_parent_cap && steps >= *opts.no_parent_cap) {
            Resolution<long long> r;
            r.state = Resolution<long long>::State::Censored;
            r.reason = CensorReason::WindowBudget;
            r.bound = n; // scanned this far without a record
            return r;
        }
    }
}

inline Resolution<long long> strict_record_of(TrajectoryWindow& w, long long i,
                                              const ExploreOptions& opts = {}) {
    return record_of(w, i, opts, true);
}

// C(i): the smallest k > i with S_k = min{S_n : n > i}, accepted once the
// minimum has survived `climb_confirm` further steps.
inline Resolution<long long> climbing_of(TrajectoryWindow& w, long long i,
                                         const ExploreOptions& opts = {}) {
    long long best = std::numeric_limits<long long>::max();
    long long best_pos = i;
    long long n = i + 1;
    long long since_improve = 0;
    while (true) {
        if (!w.ensure_index(n - 1)) return Resolution<long long>::censor(CensorReason::WindowBudget);
        const long long sn = w.sum(n);
        if (sn < best) {
            best = sn;
            best_pos = n;
            since_improve = 0;
        } else {
            ++since_improve;
            if (since_improve >= opts.climb_confirm)
                return Resolution<long long>::make(best_pos, /*heur=*/true);
        }
        ++n;
    }
}

// One pass to the left of i, shared by big_L / type_of / little_l /
// children_of. Tracks the running maximum of S over the scanned past and its
// rightmost position.
struct LeftScan {
    enum class Kind : std::uint8_t { FoundDrop, CertSpine, HeurSpine, Censored };
    Kind kind = Kind::Censored;
    long long L = 0;       // FoundDrop: L(i) = (last m with S_m > S_i) + 1
    long long type = -1;   // t(i)
    long long l = 0;       // l(i) = largest m < i with y(m, i) = t(i)
    long long max_seen = std::numeric_limits<long long>::min();
    std::optional<long long> bound;
};

inline LeftScan left_scan(TrajectoryWindow& w, long long i, const ExploreOptions& opts = {}) {
    w.ensure_index(i - 1);
    const long long si = w.sum(i);
    const auto cert = w.certified_past_sup();

    LeftScan out;
    long long max_seen = std::numeric_limits<long long>::min();
    long long argmax = i; // rightmost position attaining max_seen
    long long m = i - 1;
    long long scanned = 0;
    while (true) {
        if (!w.ensure_index(m)) {
            if (cert && si >= *cert) {
                // Barrier certificate: no past value exceeds *cert <= S_i, and
                // the barrier is attained in the past a.s. If the attainment
                // was not yet materialized, censor (budget).
                if (max_seen == *cert) {
                    out.kind = LeftScan::Kind::CertSpine;
                    out.type = si - *cert;
                    out.l = argmax;
                    out.max_seen = max_seen;
                    return out;
                }
            }
            out.kind = LeftScan::Kind::Censored;
            out.bound = max_seen == std::numeric_limits<long long>::min()
                            ? std::nullopt
                            : std::optional<long long>(si - max_seen);
            out.max_seen = max_seen;
            return out;
        }
        const long long sm = w.sum(m);
        if (sm > si) {
            out.kind = LeftScan::Kind::FoundDrop;
            out.L = m + 1;
            out.type = -1;
            out.l = m;
            out.max_seen = std::max(max_seen, sm);
            return out;
        }
        if (sm > max_seen) {
            max_seen = sm;
            argmax = m;
        }
        if (cert && si >= *cert && max_seen == *cert) {
            out.kind = LeftScan::Kind::CertSpine;
            out.type = si - *cert;
            out.l = argmax;
            out.max_seen = max_seen;
            return out;
        }
        ++scanned;
        if (opts.spine_horizon && scanned >= *opts.spine_horizon) {
            out.kind = LeftScan::Kind::HeurSpine;
            out.type = si - max_seen;
            out.l = argmax;
            out.max_seen = max_seen;
            return out;
        }
        --m;
    }
}

// L_x(i): the last point from which the whole past-to-i stretch stays at or
// below level S_i. Resolved when the scan finds S_m > S_i; ProvedInfinite
// only via a generator certificate or the explicit spine horizon.
inline Resolution<long long> big_L(TrajectoryWindow& w, long long i,
                                   const ExploreOptions& opts = {}) {
    const auto cert = w.certified_past_sup();
    if (cert) {
        w.ensure_index(i - 1);
        if (w.sum(i) >= *cert) return Resolution<long long>::infinite_case();
    }
    const auto scan = left_scan(w, i, opts);
    switch (scan.kind) {
        case LeftScan::Kind::FoundDrop: return Resolution<long long>::make(scan.L);
        case LeftScan::Kind::CertSpine: return Resolution<long long>::infinite_case();
        case LeftScan::Kind::HeurSpine: return Resolution<long long>::infinite_case(/*heur=*/true);
        case LeftScan::Kind::Censored: break;
    }
    return Resolution<long long>::censor(CensorReason::WindowBudget, scan.bound);
}

// t_x(i) = inf{y(m,i) v -1 : m < i}; early exit at -1, certificates for the
// non-negative branch.
inline Resolution<long long> type_of(TrajectoryWindow& w, long long i,
                                     const ExploreOptions& opts = {}) {
    const auto cert = w.certified_past_sup();
    if (cert) {
        w.ensure_index(i - 1);
        if (w.sum(i) >= *cert) return Resolution<long long>::make(w.sum(i) - *cert);
    }
    const auto scan = left_scan(w, i, opts);
    switch (scan.kind) {
        case LeftScan::Kind::FoundDrop: return Resolution<long long>::make(-1);
        case LeftScan::Kind::CertSpine: return Resolution<long long>::make(scan.type);
        case LeftScan::Kind::HeurSpine: return Resolution<long long>::make(scan.type, true);
        case LeftScan::Kind::Censored: break;
    }
    return Resolution<long long>::censor(CensorReason::WindowBudget, scan.bound);
}

// l_x(i) = sup{m < i : y(m, i) = t_x(i)}.
inline Resolution<long long> little_l(TrajectoryWindow& w, long long i,
                                      const ExploreOptions& opts = {}) {
    const auto scan = left_scan(w, i, opts);
    switch (scan.kind) {
        case LeftScan::Kind::FoundDrop: return Resolution<long long>::make(scan.l); // = L - 1
        case LeftScan::Kind::CertSpine: return Resolution<long long>::make(scan.l);
        case LeftScan::Kind::HeurSpine: return Resolution<long long>::make(scan.l, true);
        case LeftScan::Kind::Censored: break;
    }
    return Resolution<long long>::censor(CensorReason::WindowBudget, scan.bound);
}

namespace detail {
// Children of i via the offspring formula: count x_{i-1}+1-max(t,0); the
// m-th child is the largest j in the admissible range with
// y(j, i) = x_{i-1} + 1 - m.
inline Resolution<std::vector<long long>> children_formula(TrajectoryWindow& w, long long i,
                                                           const LeftScan& scan) {
    const long long x = w.x(i - 1);
    if (x < -1) throw std::invalid_argument("children_of(Formula): window is not skip-free");
    const long long t = scan.type;
    const long long count = x + 1 - std::max<long long>(t, 0);
    std::vector<long long> kids;
    if (count <= 0) return Resolution<std::vector<long long>>::make(std::move(kids));
    const long long lo_bound = (t == -1) ? scan.L : scan.l;
    kids.assign(static_cast<std::size_t>(count), std::numeric_limits<long long>::min());
    const long long si = w.sum(i);
    long long found = 0;
    for (long long j = i - 1; j >= lo_bound && found < count; --j) {
        const long long level = si - w.sum(j); // y(j, i)
        const long long m = x + 1 - level;     // child rank if this level is a child level
        if (m >= 1 && m <= count) {
            auto& slot = kids[static_cast<std::size_t>(m - 1)];
            if (slot == std::numeric_limits<long long>::min()) {
                slot = j;
                ++found;
            }
        }
    }
    if (found != count)
        throw std::logic_error("children_of(Formula): offspring formula inconsistent with window");
    return Resolution<std::vector<long long>>::make(std::move(kids));
}

inline Resolution<std::vector<long long>> children_brute(TrajectoryWindow& w, long long i,
                                                         const LeftScan& scan,
                                                         const ExploreOptions& opts) {
    const long long lo_bound = (scan.type == -1) ? scan.L : scan.l;
    std::vector<long long> kids;
    for (long long j = i - 1; j >= lo_bound; --j) {
        const auto r = record_of(w, j, opts);
        if (!r.resolved()) return Resolution<std::vector<long long>>::censor(r.reason);
        if (r.value == i) kids.push_back(j);
    }
    return Resolution<std::vector<long long>>::make(std::move(kids));
}
} // namespace detail

// Children of i in the record graph, eldest (largest position) first.
inline Resolution<std::vector<long long>> children_of(TrajectoryWindow& w, long long i,
                                                      ChildMode mode,
                                                      const ExploreOptions& opts = {}) {
    if (mode == ChildMode::Formula && !w.skip_free())
        throw std::invalid_argument("children_of(Formula): requires a skip-free law");
    if (!w.ensure_index(i - 1))
        return Resolution<std::vector<long long>>::censor(CensorReason::WindowBudget);
    if (w.x(i - 1) < 0) // no descendants at all
        return Resolution<std::vector<long long>>::make({});
    const auto scan = left_scan(w, i, opts);
    if (scan.kind == LeftScan::Kind::Censored)
        return Resolution<std::vector<long long>>::censor(CensorReason::WindowBudget, scan.bound);
    return mode == ChildMode::Formula ? detail::children_formula(w, i, scan)
                                      : detail::children_brute(w, i, scan, opts);
}

// D(i) = [L_x(i), i]; ProvedInfinite when L = -infinity.
inline Resolution<std::pair<long long, long long>> descendants_interval(
    TrajectoryWindow& w, long long i, const ExploreOptions& opts = {}) {
    const auto L = big_L(w, i, opts);
    if (L.resolved())
        return Resolution<std::pair<long long, long long>>::make({L.value, i}, L.heuristic);
    if (L.infinite()) return Resolution<std::pair<long long, long long>>::infinite_case(L.heuristic);
    return Resolution<std::pair<long long, long long>>::censor(L.reason, L.bound);
}

} // namespace recgraph

#endif
