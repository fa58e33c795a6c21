#ifndef RECGRAPH_TREE_HPP
#define RECGRAPH_TREE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace recgraph {

using VertexId = std::int32_t;
inline constexpr VertexId kNoVertex = -1;

enum class VertexFlag : std::uint8_t {
    Interior = 0,
    RadiusBoundary = 1, // neighborhood cut by the requested radius / truncation
    Censored = 2,       // neighborhood cut by a window or node budget
};

// Rooted ordered family tree: parent links (out-degree <= 1), children kept
// eldest-first. Lattice-built trees carry their integer positions as labels.
// Stored child lists are all-or-nothing: children_complete(v) false means no
// children of v are stored even if some exist.
class OrderedTree {
public:
    struct Vertex {
        VertexId parent = kNoVertex;
        std::vector<VertexId> children; // eldest (largest sibling) first
        VertexFlag flag = VertexFlag::Interior;
        bool on_spine = false;
        bool children_complete = true;
        bool parent_complete = true; // parent==kNoVertex then means "genuinely parentless"
        // An incomplete child list that is still a valid eldest prefix (every
        // missing child is younger than every stored one). Record-graph balls
        // have this property at window edges: missing children sit below the
        // window and sibling order is integer order.
        bool eldest_prefix = false;
        std::optional<long long> label;
    };

    VertexId add_vertex() {
        vertices_.push_back(Vertex{});
        return static_cast<VertexId>(vertices_.size() - 1);
    }

    VertexId add_child(VertexId parent, std::size_t position_eldest_first) {
        const VertexId c = add_vertex();
        auto& kids = vertices_[static_cast<std::size_t>(parent)].children;
        if (position_eldest_first > kids.size())
            throw std::invalid_argument("OrderedTree::add_child: bad position");
        kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(position_eldest_first), c);
        vertices_[static_cast<std::size_t>(c)].parent = parent;
        return c;
    }

    VertexId append_child(VertexId parent) {
        return add_child(parent, vertices_[static_cast<std::size_t>(parent)].children.size());
    }

    std::size_t size() const { return vertices_.size(); }
    bool empty() const { return vertices_.empty(); }

    Vertex& at(VertexId v) { return vertices_.at(static_cast<std::size_t>(v)); }
    const Vertex& at(VertexId v) const { return vertices_.at(static_cast<std::size_t>(v)); }

    VertexId root() const { return root_; }
    void set_root(VertexId r) { root_ = r; }

    VertexId parent_of(VertexId v) const { return at(v).parent; }
    const std::vector<VertexId>& children_of(VertexId v) const { return at(v).children; }
    std::size_t d1(VertexId v) const { return at(v).children.size(); }

    // Structural top of the stored tree: follow parent links from the root.
    VertexId top() const {
        VertexId t = root_;
        while (t != kNoVertex && at(t).parent != kNoVertex) t = at(t).parent;
        return t;
    }

    std::size_t depth_below_top(VertexId v) const {
        std::size_t d = 0;
        while (at(v).parent != kNoVertex) {
            v = at(v).parent;
            ++d;
        }
        return d;
    }

    // Sibling rank, 1 = eldest; 0 when v has no stored parent.
    std::size_t child_rank(VertexId v) const {
        const VertexId p = at(v).parent;
        if (p == kNoVertex) return 0;
        const auto& kids = at(p).children;
        for (std::size_t i = 0; i < kids.size(); ++i)
            if (kids[i] == v) return i + 1;
        throw std::logic_error("OrderedTree: parent/children inconsistent");
    }

    void check_consistency() const {
        std::size_t parentless = 0;
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            const auto v = static_cast<VertexId>(i);
            const auto& vert = vertices_[i];
            if (vert.parent == kNoVertex) {
                ++parentless;
            } else {
                const auto& kids = at(vert.parent).children;
                if (std::find(kids.begin(), kids.end(), v) == kids.end())
                    throw std::logic_error("OrderedTree: child missing from parent list");
            }
            for (VertexId c : vert.children)
                if (at(c).parent != v) throw std::logic_error("OrderedTree: parent link mismatch");
        }
        if (!vertices_.empty() && parentless != 1)
            throw std::logic_error("OrderedTree: expected exactly one parentless vertex");
    }

private:
    std::vector<Vertex> vertices_;
    VertexId root_ = kNoVertex;
};

enum class RlsOrdering { Less, Equal, Greater, Incomparable };

namespace detail {
inline std::vector<VertexId> ancestor_chain(const OrderedTree& t, VertexId v) {
    std::vector<VertexId> chain{v};
    while (t.at(chain.back()).parent != kNoVertex) chain.push_back(t.at(chain.back()).parent);
    return chain;
}

inline std::size_t sibling_index(const OrderedTree& t, VertexId v) {
    const auto& kids = t.at(t.at(v).parent).children;
    for (std::size_t i = 0; i < kids.size(); ++i)
        if (kids[i] == v) return i;
    throw std::logic_error("sibling_index: not a child of its parent");
}
} // namespace detail

// Royal Line of Succession order. v > u when v is an ancestor of u, or when
// the branch of v at the least common ancestor is elder.
inline RlsOrdering rls_compare(const OrderedTree& t, VertexId u, VertexId v) {
    if (u == v) return RlsOrdering::Equal;
    auto cu = detail::ancestor_chain(t, u);
    auto cv = detail::ancestor_chain(t, v);
    if (cu.back() != cv.back()) return RlsOrdering::Incomparable;
    auto iu = cu.rbegin();
    auto iv = cv.rbegin();
    while (iu != cu.rend() && iv != cv.rend() && *iu == *iv) {
        ++iu;
        ++iv;
    }
    if (iu == cu.rend()) return RlsOrdering::Greater; // u is an ancestor of v
    if (iv == cv.rend()) return RlsOrdering::Less;    // v is an ancestor of u
    // *iu, *iv are distinct children of the LCA; smaller storage index = elder.
    return detail::sibling_index(t, *iu) < detail::sibling_index(t, *iv) ? RlsOrdering::Greater
                                                                         : RlsOrdering::Less;
}

enum class StepStatus { Ok, End, Censored };

struct SuccessionStep {
    StepStatus status = StepStatus::End;
    VertexId vertex = kNoVertex;
};

// Immediate RLS predecessor b(u) = max{v : v < u}: the eldest child when u
// has children, else the next-younger sibling found while climbing. End means
// u is genuinely RLS-minimal in the stored (complete) tree. Eldest-prefix
// lists still certify the eldest child and every stored next-younger sibling.
inline SuccessionStep b_step(const OrderedTree& t, VertexId u) {
    const bool kids_usable = t.at(u).children_complete || t.at(u).eldest_prefix;
    if (!kids_usable) return {StepStatus::Censored, kNoVertex};
    if (!t.at(u).children.empty()) return {StepStatus::Ok, t.at(u).children.front()};
    if (!t.at(u).children_complete) return {StepStatus::Censored, kNoVertex}; // empty prefix
    VertexId walk = u;
    while (true) {
        if (!t.at(walk).parent_complete) return {StepStatus::Censored, kNoVertex};
        const VertexId p = t.at(walk).parent;
        if (p == kNoVertex) return {StepStatus::End, kNoVertex};
        const std::size_t idx = detail::sibling_index(t, walk);
        const auto& kids = t.at(p).children;
        if (idx + 1 < kids.size()) return {StepStatus::Ok, kids[idx + 1]};
        if (!t.at(p).children_complete) return {StepStatus::Censored, kNoVertex};
        walk = p;
    }
}

// Immediate RLS successor a(u) = min{v : v > u}: the RLS-minimum of the
// immediately elder sibling's subtree, else the parent.
inline SuccessionStep a_step(const OrderedTree& t, VertexId u) {
    if (!t.at(u).parent_complete) return {StepStatus::Censored, kNoVertex};
    const VertexId p = t.at(u).parent;
    if (p == kNoVertex) return {StepStatus::End, kNoVertex}; // RLS maximum
    const std::size_t idx = detail::sibling_index(t, u);
    if (idx == 0) return {StepStatus::Ok, p};
    VertexId v = t.at(p).children[idx - 1];
    while (true) {
        if (!t.at(v).children_complete) return {StepStatus::Censored, kNoVertex};
        if (t.at(v).children.empty()) return {StepStatus::Ok, v};
        v = t.at(v).children.back(); // youngest child
    }
}

inline std::optional<VertexId> b_map(const OrderedTree& t, VertexId u) {
    const auto s = b_step(t, u);
    return s.status == StepStatus::Ok ? std::optional<VertexId>(s.vertex) : std::nullopt;
}

inline std::optional<VertexId> a_map(const OrderedTree& t, VertexId u) {
    const auto s = a_step(t, u);
    return s.status == StepStatus::Ok ? std::optional<VertexId>(s.vertex) : std::nullopt;
}

// Succession window through o: up to n_back steps of b and n_fwd steps of a.
// Stops early at genuine ends (finite trees) or at censoring.
struct SuccessionWindow {
    std::vector<VertexId> line;
    std::size_t origin_index = 0;
    bool back_censored = false;
    bool fwd_censored = false;
};

inline SuccessionWindow succession_window(const OrderedTree& t, VertexId o,
                                          std::size_t n_back, std::size_t n_fwd) {
    std::vector<VertexId> back;
    VertexId cur = o;
    bool back_censored = false;
    for (std::size_t i = 0; i < n_back; ++i) {
        const auto s = b_step(t, cur);
        if (s.status != StepStatus::Ok) {
            back_censored = s.status == StepStatus::Censored;
            break;
        }
        back.push_back(s.vertex);
        cur = s.vertex;
    }
    std::vector<VertexId> fwd;
    cur = o;
    bool fwd_censored = false;
    for (std::size_t i = 0; i < n_fwd; ++i) {
        const auto s = a_step(t, cur);
        if (s.status != StepStatus::Ok) {
            fwd_censored = s.status == StepStatus::Censored;
            break;
        }
        fwd.push_back(s.vertex);
        cur = s.vertex;
    }
    SuccessionWindow out;
    out.line.assign(back.rbegin(), back.rend());
    out.origin_index = out.line.size();
    out.line.push_back(o);
    out.line.insert(out.line.end(), fwd.begin(), fwd.end());
    out.back_censored = back_censored;
    out.fwd_censored = fwd_censored;
    return out;
}

// Full RLS sort of a finite tree: children's subtrees youngest-first, each
// vertex after its descendants.
namespace detail {
inline void rls_sort_rec(const OrderedTree& t, VertexId v, std::vector<VertexId>& out) {
    const auto& kids = t.at(v).children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) rls_sort_rec(t, *it, out);
    out.push_back(v);
}
} // namespace detail

inline std::vector<VertexId> rls_sort(const OrderedTree& t) {
    std::vector<VertexId> out;
    out.reserve(t.size());
    if (!t.empty()) detail::rls_sort_rec(t, t.top(), out);
    return out;
}

enum class SuccessionLineCount { One, Two, Undetermined };

// A second succession line exists iff W = {u : u precedes every vertex of the
// bi-infinite path} is non-empty, i.e. some spine vertex has a child younger
// than its spine child. Requires spine annotations.
inline SuccessionLineCount count_succession_lines(const OrderedTree& t) {
    bool saw_decidable_spine = false;
    bool saw_spine = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto v = static_cast<VertexId>(i);
        if (!t.at(v).on_spine) continue;
        saw_spine = true;
        if (!t.at(v).children_complete) continue; // undecidable at this vertex
        const auto& kids = t.at(v).children;
        std::size_t spine_idx = kids.size();
        for (std::size_t j = 0; j < kids.size(); ++j)
            if (t.at(kids[j]).on_spine) spine_idx = j;
        if (spine_idx == kids.size()) continue; // bottom of the stored spine
        saw_decidable_spine = true;
        if (spine_idx + 1 < kids.size()) return SuccessionLineCount::Two;
    }
    if (!saw_spine || !saw_decidable_spine) return SuccessionLineCount::Undetermined;
    return SuccessionLineCount::One;
}

// ---------------------------------------------------------------------------
// Canonical ball keys

struct BallKey {
    std::string key;
    bool operator==(const BallKey& other) const = default;
    auto operator<=>(const BallKey& other) const = default;
};

namespace detail {
inline char flag_glyph(VertexFlag f) {
    switch (f) {
        case VertexFlag::Interior: return '.';
        case VertexFlag::RadiusBoundary: return 'r';
        case VertexFlag::Censored: return 'c';
    }
    return '?';
}

// Deterministic recursive encoding of the radius-`budget` ball around v.
// `came_from` marks the edge we arrived on (encoded as '*' among children or
// an implicit parent), so sibling positions and the parent direction are part
// of the key. Ordered structure makes the traversal itself canonical.
inline void encode_ball(const OrderedTree& t, VertexId v, VertexId came_from, int budget,
                        std::string& out) {
    out.push_back('(');
    if (budget == 0) {
        // at the key's own cut the stored flag is irrelevant: the induced
        // ball ends here either way
        out.push_back('!');
        out.push_back(')');
        return;
    }
    out.push_back(flag_glyph(t.at(v).flag));
    const VertexId p = t.at(v).parent;
    if (p != kNoVertex && p != came_from) {
        out.push_back('^');
        encode_ball(t, p, v, budget - 1, out);
    } else if (p == kNoVertex) {
        out.push_back('^');
        out.push_back(t.at(v).parent_complete ? '-' : '?');
    }
    out.push_back('[');
    const auto& kids = t.at(v).children;
    for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i > 0) out.push_back(',');
        if (kids[i] == came_from)
            out.push_back('*');
        else
            encode_ball(t, kids[i], v, budget - 1, out);
    }
    if (!t.at(v).children_complete) out.push_back('?');
    out.push_back(']');
    out.push_back(')');
}
} // namespace detail

inline BallKey ball_key(const OrderedTree& t, VertexId root, int radius) {
    std::string s = "v1:r=" + std::to_string(radius) + ":";
    detail::encode_ball(t, root, kNoVertex, radius, s);
    return BallKey{std::move(s)};
}

// True when every vertex within graph distance < radius of `root` has a fully
// known neighborhood (so the radius-`radius` ball key is exact).
inline bool ball_fully_resolved(const OrderedTree& t, VertexId root, int radius) {
    std::vector<std::pair<VertexId, int>> stack{{root, radius}};
    std::vector<char> seen(t.size(), 0);
    seen[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
        auto [v, budget] = stack.back();
        stack.pop_back();
        if (budget == 0) continue;
        if (!t.at(v).children_complete || !t.at(v).parent_complete) return false;
        const VertexId p = t.at(v).parent;
        if (p != kNoVertex && !seen[static_cast<std::size_t>(p)]) {
            seen[static_cast<std::size_t>(p)] = 1;
            stack.push_back({p, budget - 1});
        }
        for (VertexId c : t.at(v).children) {
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = 1;
                stack.push_back({c, budget - 1});
            }
        }
    }
    return true;
}

// Subtree induced by the non-descendants of `root` plus `root` itself, with
// `root` made childless. Sibling positions of the copied vertices survive.
inline OrderedTree non_descendant_tree(const OrderedTree& t, VertexId root) {
    std::vector<char> is_desc(t.size(), 0);
    std::vector<VertexId> stack{root};
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        is_desc[static_cast<std::size_t>(v)] = 1;
        for (VertexId c : t.at(v).children) stack.push_back(c);
    }
    OrderedTree out;
    std::vector<VertexId> map(t.size(), kNoVertex);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto v = static_cast<VertexId>(i);
        if (is_desc[i] && v != root) continue;
        const VertexId nv = out.add_vertex();
        map[i] = nv;
        auto& dst = out.at(nv);
        const auto& src = t.at(v);
        dst.flag = src.flag;
        dst.on_spine = src.on_spine;
        dst.label = src.label;
        dst.parent_complete = src.parent_complete;
        dst.children_complete = (v == root) ? true : src.children_complete;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (map[i] == kNoVertex || (is_desc[i] && static_cast<VertexId>(i) != root)) continue;
        if (static_cast<VertexId>(i) == root) continue; // drop root's children
        for (VertexId c : t.at(static_cast<VertexId>(i)).children) {
            const VertexId mc = map[static_cast<std::size_t>(c)];
            if (mc == kNoVertex) continue;
            out.at(map[i]).children.push_back(mc);
            out.at(mc).parent = map[i];
        }
    }
    out.set_root(map[static_cast<std::size_t>(root)]);
    return out;
}

// ---------------------------------------------------------------------------
// Text format
//
//   tree    := vertex [rootpath]
//   vertex  := [label] [marks] body
//   body    := '[' list ']'      at the top level
//            | '(' list ')'      below the top
//   list    := '' | vertex (',' vertex)*
//   label   := '-'? digits
//   marks   := '~'? ('!' | '?')?     ~ spine, ! radius boundary, ? censored
//   rootpath:= '@' idx ('.' idx)*    child indices from the top to the
//                                    distinguished root, when it is not the top
//
// Example: 0[-1(),-2(),-3(-4(),-5())] -- root 0 with ordered children
// -1,-2,-3 and grandchildren -4,-5 under -3.

namespace detail {
inline void serialize_vertex(const OrderedTree& t, VertexId v, bool top, std::string& out) {
    const auto& vert = t.at(v);
    if (vert.label) out += std::to_string(*vert.label);
    if (vert.on_spine) out.push_back('~');
    if (vert.flag == VertexFlag::RadiusBoundary) out.push_back('!');
    if (vert.flag == VertexFlag::Censored) out.push_back('?');
    out.push_back(top ? '[' : '(');
    const auto& kids = vert.children;
    for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i > 0) out.push_back(',');
        serialize_vertex(t, kids[i], false, out);
    }
    out.push_back(top ? ']' : ')');
}
} // namespace detail

inline std::string serialize(const OrderedTree& t) {
    if (t.empty()) return "[]";
    std::string out;
    detail::serialize_vertex(t, t.top(), true, out);
    if (t.root() != kNoVertex && t.root() != t.top()) {
        std::vector<std::size_t> path;
        VertexId v = t.root();
        while (t.at(v).parent != kNoVertex) {
            path.push_back(detail::sibling_index(t, v));
            v = t.at(v).parent;
        }
        out += "@";
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            if (it != path.rbegin()) out += ".";
            out += std::to_string(*it);
        }
    }
    return out;
}

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

namespace detail {
struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    char peek() const { return pos < s.size() ? s[pos] : '\0'; }

    VertexId parse_vertex(OrderedTree& t, bool top) {
        const VertexId v = t.add_vertex();
        if (peek() == '-' || (peek() >= '0' && peek() <= '9')) {
            const std::size_t start = pos;
            if (peek() == '-') ++pos;
            if (!(peek() >= '0' && peek() <= '9')) throw ParseError("expected digits after '-'", pos);
            while (peek() >= '0' && peek() <= '9') ++pos;
            t.at(v).label = std::stoll(s.substr(start, pos - start));
        }
        if (peek() == '~') {
            t.at(v).on_spine = true;
            ++pos;
        }
        if (peek() == '!') {
            t.at(v).flag = VertexFlag::RadiusBoundary;
            ++pos;
        } else if (peek() == '?') {
            t.at(v).flag = VertexFlag::Censored;
            ++pos;
        }
        const char open = top ? '[' : '(';
        const char close = top ? ']' : ')';
        if (peek() != open) throw ParseError(std::string("expected '") + open + "'", pos);
        ++pos;
        if (peek() != close) {
            while (true) {
                const VertexId c = parse_vertex(t, false);
                t.at(c).parent = v;
                t.at(v).children.push_back(c);
                if (peek() == ',') {
                    ++pos;
                    continue;
                }
                break;
            }
        }
        if (peek() != close) throw ParseError(std::string("expected '") + close + "'", pos);
        ++pos;
        if (t.at(v).flag != VertexFlag::Interior && t.at(v).children.empty())
            t.at(v).children_complete = false;
        return v;
    }
};
} // namespace detail

inline OrderedTree parse_tree(const std::string& text) {
    detail::Parser p{text};
    OrderedTree t;
    const VertexId top = p.parse_vertex(t, true);
    t.set_root(top);
    if (t.at(top).flag != VertexFlag::Interior) t.at(top).parent_complete = false;
    if (p.peek() == '@') {
        ++p.pos;
        VertexId v = top;
        while (true) {
            const std::size_t start = p.pos;
            while (p.peek() >= '0' && p.peek() <= '9') ++p.pos;
            if (p.pos == start) throw ParseError("expected child index", p.pos);
            const auto idx = static_cast<std::size_t>(std::stoull(text.substr(start, p.pos - start)));
            if (idx >= t.at(v).children.size()) throw ParseError("child index out of range", start);
            v = t.at(v).children[idx];
            if (p.peek() == '.') {
                ++p.pos;
                continue;
            }
            break;
        }
        t.set_root(v);
    }
    if (p.pos != text.size()) throw ParseError("trailing characters", p.pos);
    return t;
}

} // namespace recgraph

#endif
