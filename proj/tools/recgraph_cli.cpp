// Command-line driver: reproducible batch experiments over record graphs.
//
// Subcommands: phase, compare, mtp, analytics, codec, simulate.
// Every output embeds the resolved config and a format version. Exit codes:
// 0 all checks pass, 2 statistical check outside tolerance, 3 invariant
// violation, 4 config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <recgraph/analytics.hpp>
#include <recgraph/codec.hpp>
#include <recgraph/explore.hpp>
#include <recgraph/samplers.hpp>
#include <recgraph/stats.hpp>

using json = nlohmann::json;
using namespace recgraph;

namespace {

constexpr const char* kFormatVersion = "recgraph-v1";

constexpr int kExitOk = 0;
constexpr int kExitStatistical = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitConfig = 4;

struct CliContext {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;
    long long samples = 10'000;
    int radius = 2;
    long long budget = 1'000'000;
    unsigned threads = 1;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_output(const CliContext& ctx, const std::string& text) {
    if (ctx.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(ctx.out_path);
    if (!out) throw std::runtime_error("cannot open output file " + ctx.out_path);
    out << text;
}

json load_config(const CliContext& ctx) {
    if (ctx.config_path.empty()) return json::object();
    std::ifstream in(ctx.config_path);
    if (!in) throw std::invalid_argument("cannot open config file " + ctx.config_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config JSON: ") + e.what());
    }
    return j;
}

IncrementLaw law_from_json(const json& j) {
    if (!j.contains("atoms")) throw std::invalid_argument("law: missing atoms");
    std::vector<Atom> atoms;
    for (const auto& pair : j.at("atoms"))
        atoms.emplace_back(pair.at(0).get<long long>(), pair.at(1).get<double>());
    const auto kind = j.value("kind", std::string("skip_free")) == "general"
                          ? IncrementLaw::Kind::GeneralInteger
                          : IncrementLaw::Kind::SkipFree;
    return make_law(std::move(atoms), kind);
}

OffspringLaw offspring_from_json(const json& j) {
    std::vector<std::pair<long long, double>> atoms;
    for (const auto& pair : j)
        atoms.emplace_back(pair.at(0).get<long long>(), pair.at(1).get<double>());
    return make_offspring(std::move(atoms));
}

json law_to_json(const IncrementLaw& law) {
    json atoms = json::array();
    for (const auto& [v, p] : law.atoms) atoms.push_back({v, p});
    return {{"atoms", atoms}};
}

json offspring_to_json(const OffspringLaw& law) {
    json atoms = json::array();
    for (const auto& [v, p] : law.atoms) atoms.push_back({v, p});
    return atoms;
}

// Sampler spec: {"family": "tgwt", "pi": [[0,0.5],[1,0.5]], ...}
std::function<OrderedTree(std::uint64_t)> sampler_from_json(const json& spec, long long node_budget,
                                                            int depth_cap) {
    const std::string family = spec.at("family").get<std::string>();
    if (family == "gw") {
        const auto pi = offspring_from_json(spec.at("pi"));
        return [=](std::uint64_t s) { return sample_gw(pi, s, node_budget, depth_cap).tree; };
    }
    if (family == "tgwt") {
        const auto pi = offspring_from_json(spec.at("pi"));
        return [=](std::uint64_t s) { return sample_tgwt(pi, s, node_budget, depth_cap).tree; };
    }
    if (family == "egwt") {
        const auto pi = offspring_from_json(spec.at("pi"));
        const int radius = spec.value("radius", 4);
        return [=](std::uint64_t s) {
            return sample_egwt(pi, radius, s, node_budget, depth_cap).tree;
        };
    }
    if (family == "ekt") {
        const auto alpha = offspring_from_json(spec.at("alpha"));
        const auto beta = offspring_from_json(spec.at("beta"));
        const int radius = spec.value("radius", 4);
        const bool ecs = spec.value("ecs", true);
        return [=](std::uint64_t s) {
            return sample_ekt(alpha, beta, radius, ecs, s, node_budget, depth_cap).tree;
        };
    }
    if (family == "unimodularised_ekt") {
        const auto alpha = offspring_from_json(spec.at("alpha"));
        const auto beta = offspring_from_json(spec.at("beta"));
        const int radius = spec.value("radius", 4);
        const long long size_cap = spec.value("size_cap", 4096);
        return [=](std::uint64_t s) {
            return unimodularised_ekt(alpha, beta, radius, s, size_cap, node_budget, depth_cap).tree;
        };
    }
    if (family == "reroot_gw") {
        const auto pi = offspring_from_json(spec.at("pi"));
        const long long size_cap = spec.value("size_cap", 4096);
        return [=](std::uint64_t s) {
            return typical_reroot([&](std::uint64_t ss) { return sample_gw(pi, ss, node_budget).tree; },
                                  s, size_cap)
                .tree;
        };
    }
    throw std::invalid_argument("unknown sampler family: " + family);
}

const char* class_name(ExplorationClass c) {
    switch (c) {
        case ExplorationClass::FiniteComponentCertified: return "FiniteComponentCertified";
        case ExplorationClass::SpineEvidence: return "SpineEvidence";
        case ExplorationClass::AllDescendantsFiniteEvidence: return "AllDescendantsFiniteEvidence";
        case ExplorationClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// phase: sweep laws (and the queue chain) through classify_exploration.

int run_phase(const CliContext& ctx) {
    json cfg = load_config(ctx);
    if (!cfg.contains("laws")) {
        cfg["laws"] = json::array({law_to_json(make_law({{-1, 0.75}, {1, 0.25}})),
                                   law_to_json(make_law({{-1, 0.5}, {1, 0.5}})),
                                   law_to_json(make_law({{-1, 0.25}, {1, 0.75}}))});
    }
    if (!cfg.contains("queue")) cfg["queue"] = {{"lambda", 1.0}, {"mu", 2.0}};
    const long long horizon = cfg.value("horizon", 10'000);
    const long long seeds = cfg.value("seeds", ctx.samples);
    cfg["horizon"] = horizon;
    cfg["seeds"] = seeds;
    cfg["seed"] = ctx.seed;
    cfg["format"] = kFormatVersion;

    std::ostringstream out;
    out << "# " << cfg.dump() << "\n";
    out << "source,mean,seed,class\n";

    for (std::size_t li = 0; li < cfg["laws"].size(); ++li) {
        const auto law = law_from_json(cfg["laws"][li]);
        for (long long s = 0; s < seeds; ++s) {
            const auto ws = sample_seed(ctx.seed, static_cast<std::uint64_t>(s));
            auto w = iid_window(law, ws, 8192);
            const auto rep = classify_exploration(w, horizon);
            out << "law" << li << "," << format_double(law.mean()) << "," << ws << ","
                << class_name(rep.cls) << "\n";
        }
    }
    QueueChainParams qp{cfg["queue"].value("lambda", 1.0), cfg["queue"].value("mu", 2.0)};
    for (long long s = 0; s < seeds; ++s) {
        const auto ws = sample_seed(ctx.seed ^ 0xABCDULL, static_cast<std::uint64_t>(s));
        auto w = queue_window(qp, ws, 8192);
        const auto rep = classify_exploration(w, horizon);
        out << "queue,0,"  << ws << "," << class_name(rep.cls) << "\n";
    }
    write_output(ctx, out.str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// compare: record-component ball law against the matching theorem sampler.

int run_compare(const CliContext& ctx) {
    json cfg = load_config(ctx);
    if (!cfg.contains("law")) cfg["law"] = law_to_json(make_law({{-1, 0.75}, {1, 0.25}}));
    const auto law = law_from_json(cfg.at("law"));
    const double mean = law.mean();
    const int radius = cfg.value("radius", ctx.radius);
    const long long n = cfg.value("samples", ctx.samples);
    const double tolerance = cfg.value("tolerance", mean > 0 ? 0.03 : 0.02);
    cfg["samples"] = n;
    cfg["radius"] = radius;
    cfg["seed"] = ctx.seed;
    cfg["tolerance"] = tolerance;
    cfg["format"] = kFormatVersion;

    // record side
    ExploreOptions opts;
    opts.node_budget = ctx.budget;
    if (mean < 0) opts.no_parent_cap = 4096;
    if (mean > 0) opts.spine_horizon = 4096;
    auto record_sampler = [&](std::uint64_t s) {
        auto w = iid_window(law, s, /*extension_budget=*/512);
        return record_ball(w, radius, opts).tree;
    };
    auto record_law = empirical_local_law(record_sampler, radius, n, ctx.seed, ctx.threads);

    // theorem side
    const auto pack = derive_laws(law);
    std::function<OrderedTree(std::uint64_t)> theorem;
    std::string family;
    if (mean < 0) {
        family = "tgwt";
        const auto pi = pack.offspring;
        theorem = [=](std::uint64_t s) {
            return sample_tgwt(pi, s, 1'000'000, radius + 2).tree;
        };
    } else if (mean == 0) {
        family = "egwt";
        const auto pi = pack.offspring;
        theorem = [=](std::uint64_t s) {
            return sample_egwt(pi, radius + 1, s, 1'000'000, radius + 2).tree;
        };
    } else {
        family = "unimodularised_ekt";
        const auto alpha = *pack.pi_bar;
        const auto beta = *pack.pi_tilde;
        theorem = [=](std::uint64_t s) {
            return unimodularised_ekt(alpha, beta, radius + 1, s, 4096, 1'000'000, radius + 2).tree;
        };
    }
    auto theorem_law = empirical_local_law(theorem, radius, n, ctx.seed ^ 0x7177ULL, ctx.threads);

    const double tv = tv_distance(record_law, theorem_law);

    json report;
    report["config"] = cfg;
    report["family"] = family;
    report["tv"] = tv;
    report["record_total"] = record_law.total;
    report["record_dropped"] = record_law.dropped;
    report["sampler_total"] = theorem_law.total;
    report["sampler_dropped"] = theorem_law.dropped;
    json diffs = json::array();
    for (const auto& [key, count] : record_law.counts) {
        const double pr = static_cast<double>(count) / record_law.total;
        const double ps = theorem_law.prob_of(key);
        if (std::abs(pr - ps) > 1e-3)
            diffs.push_back({{"key", key}, {"record", pr}, {"sampler", ps}});
    }
    report["per_key_diffs"] = diffs;
    report["pass"] = tv < tolerance;
    write_output(ctx, report.dump(2) + "\n");
    return tv < tolerance ? kExitOk : kExitStatistical;
}

// ---------------------------------------------------------------------------
// mtp: the standard transport family against a sampler spec.

int run_mtp(const CliContext& ctx) {
    json cfg = load_config(ctx);
    if (!cfg.contains("sampler"))
        cfg["sampler"] = {{"family", "tgwt"}, {"pi", json::array({{0, 0.5}, {1, 0.5}})}};
    const long long n = cfg.value("samples", ctx.samples);
    const std::size_t family_size = cfg.value("family_size", 20);
    const double z_bound = cfg.value("z_bound", 4.0);
    cfg["samples"] = n;
    cfg["seed"] = ctx.seed;
    cfg["family_size"] = family_size;
    cfg["z_bound"] = z_bound;
    cfg["format"] = kFormatVersion;

    auto sampler = sampler_from_json(cfg.at("sampler"), ctx.budget, /*depth_cap=*/5);
    const auto family = standard_transport_family(family_size);

    json rows = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto rep = mtp_check(sampler, family[i], n,
                                   hash2(ctx.seed, static_cast<std::uint64_t>(i)), ctx.threads);
        rows.push_back({{"h", family[i].id},
                        {"mean_out", rep.mean_out},
                        {"mean_in", rep.mean_in},
                        {"z", rep.z_score},
                        {"samples", rep.samples},
                        {"dropped", rep.dropped}});
        worst = std::max(worst, std::abs(rep.z_score));
    }
    json report;
    report["config"] = cfg;
    report["transports"] = rows;
    report["worst_abs_z"] = worst;
    report["pass"] = worst < z_bound;
    write_output(ctx, report.dump(2) + "\n");
    return worst < z_bound ? kExitOk : kExitStatistical;
}

// ---------------------------------------------------------------------------
// analytics: DerivedLaws report for one increment law.

int run_analytics(const CliContext& ctx) {
    json cfg = load_config(ctx);
    if (!cfg.contains("law")) cfg["law"] = law_to_json(make_law({{-1, 0.25}, {1, 0.75}}));
    const auto law = law_from_json(cfg.at("law"));
    cfg["format"] = kFormatVersion;

    const auto pack = derive_laws(law);
    json report;
    report["config"] = cfg;
    report["mean"] = law.mean();
    report["c"] = pack.c;
    report["doob"] = law_to_json(pack.doob);
    report["doob_mean"] = pack.doob.mean();
    report["offspring_pi"] = offspring_to_json(pack.offspring);
    if (pack.pi_tilde) report["pi_tilde"] = offspring_to_json(*pack.pi_tilde);
    if (pack.pi_bar) report["pi_bar"] = offspring_to_json(*pack.pi_bar);
    write_output(ctx, report.dump(2) + "\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// codec: encode / decode / roundtrip driver.

int run_codec(const CliContext& ctx, const std::string& mode, const std::string& tree_path,
              const std::string& seq_path) {
    if (mode == "encode") {
        std::ifstream in(tree_path);
        if (!in) throw std::invalid_argument("cannot open tree file " + tree_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.pop_back();
        const auto tree = parse_tree(text);
        const auto phi = phi_R(tree, tree.root(), tree.size() + 1, tree.size() + 1);
        std::ostringstream out;
        for (std::size_t i = 0; i < phi.code.values.size(); ++i) {
            if (i) out << " ";
            out << phi.code.values[i];
        }
        out << "\n";
        write_output(ctx, out.str());
        return phi.ok ? kExitOk : kExitInvariant;
    }
    if (mode == "decode") {
        std::ifstream in(seq_path);
        if (!in) throw std::invalid_argument("cannot open sequence file " + seq_path);
        std::vector<long long> values;
        long long v;
        while (in >> v) values.push_back(v);
        // by default the code occupies [-len, 0): vertex 0 is the decoded root
        const CodeSequence y{-static_cast<long long>(values.size()), values};
        const auto tree = psi_R(y, ctx.budget);
        write_output(ctx, serialize(tree) + "\n");
        return kExitOk;
    }
    if (mode == "roundtrip") {
        json cfg = load_config(ctx);
        if (!cfg.contains("law")) cfg["law"] = law_to_json(make_law({{-1, 0.5}, {1, 0.5}}));
        const auto law = law_from_json(cfg.at("law"));
        const long long seeds = cfg.value("seeds", ctx.samples);
        const long long half_window = cfg.value("half_window", 32LL);
        const long long window_factor = cfg.value("window_factor", 8LL);
        cfg["seeds"] = seeds;
        cfg["half_window"] = half_window;
        cfg["window_factor"] = window_factor;
        cfg["seed"] = ctx.seed;
        cfg["format"] = kFormatVersion;
        long long matched = 0, mismatched = 0, censored = 0;
        for (long long s = 0; s < seeds; ++s) {
            auto w = iid_window(law, sample_seed(ctx.seed, static_cast<std::uint64_t>(s)), 4096);
            const auto rep = roundtrip_check(w, half_window, ctx.budget, window_factor);
            matched += rep.matched;
            mismatched += rep.mismatched;
            censored += rep.censored;
        }
        json report;
        report["config"] = cfg;
        report["matched"] = matched;
        report["mismatched"] = mismatched;
        report["censored"] = censored;
        report["pass"] = mismatched == 0;
        write_output(ctx, report.dump(2) + "\n");
        return mismatched == 0 ? kExitOk : kExitInvariant;
    }
    throw std::invalid_argument("codec mode must be encode, decode or roundtrip");
}

// ---------------------------------------------------------------------------
// simulate: one component ball with the tree text and JSONL vertex table.

int run_simulate(const CliContext& ctx) {
    json cfg = load_config(ctx);
    if (!cfg.contains("law") && !cfg.contains("queue"))
        cfg["law"] = law_to_json(make_law({{-1, 0.5}, {1, 0.5}}));
    const int radius = cfg.value("radius", ctx.radius);
    const std::string shift = cfg.value("shift", std::string("record"));
    cfg["radius"] = radius;
    cfg["seed"] = ctx.seed;
    cfg["shift"] = shift;
    cfg["format"] = kFormatVersion;

    auto w = cfg.contains("queue")
                 ? queue_window({cfg["queue"].value("lambda", 1.0), cfg["queue"].value("mu", 2.0)},
                                ctx.seed)
                 : iid_window(law_from_json(cfg.at("law")), ctx.seed);
    ExploreOptions opts;
    opts.node_budget = ctx.budget;
    if (cfg.contains("spine_horizon")) opts.spine_horizon = cfg["spine_horizon"].get<long long>();
    if (cfg.contains("no_parent_cap")) opts.no_parent_cap = cfg["no_parent_cap"].get<long long>();

    VertexShiftKind kind = VertexShiftKind::Record;
    if (shift == "strict_record") kind = VertexShiftKind::StrictRecord;
    else if (shift == "climbing") kind = VertexShiftKind::ClimbingPoint;
    else if (shift != "record") throw std::invalid_argument("unknown shift: " + shift);

    const auto ball = shift_graph_ball(w, kind, radius, opts);
    const auto& t = ball.tree;

    std::ostringstream out;
    out << "# " << cfg.dump() << "\n";
    out << serialize(t) << "\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto v = static_cast<VertexId>(i);
        json row;
        row["index"] = *t.at(v).label;
        const VertexId p = t.at(v).parent;
        if (p == kNoVertex)
            row["parent"] = nullptr;
        else
            row["parent"] = *t.at(p).label;
        row["child_rank"] = t.child_rank(v);
        // per-vertex type and L resolved on demand
        {
            auto tr = type_of(w, *t.at(v).label, opts);
            if (tr.resolved())
                row["type"] = tr.value;
            else
                row["type"] = nullptr;
            auto lr = big_L(w, *t.at(v).label, opts);
            if (lr.resolved())
                row["L"] = lr.value;
            else if (lr.infinite())
                row["L"] = "-inf";
            else
                row["L"] = nullptr;
        }
        row["censored"] = t.at(v).flag == VertexFlag::Censored;
        out << row.dump() << "\n";
    }
    write_output(ctx, out.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"record graph simulation and verification toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags are valid after the subcommand too

    CliContext ctx;
    app.add_option("--config", ctx.config_path, "JSON config file");
    app.add_option("--seed", ctx.seed, "base seed")->capture_default_str();
    app.add_option("--samples", ctx.samples, "sample count")->capture_default_str();
    app.add_option("--radius", ctx.radius, "ball radius")->capture_default_str();
    app.add_option("--budget", ctx.budget, "node budget")->capture_default_str();
    app.add_option("--threads", ctx.threads, "worker threads")->capture_default_str();
    app.add_option("--out", ctx.out_path, "output file (default stdout)");

    auto* phase = app.add_subcommand("phase", "classify record components across drift regimes");
    auto* compare = app.add_subcommand("compare", "record ball law vs the matching tree family");
    auto* mtp = app.add_subcommand("mtp", "mass transport checks over the standard family");
    auto* analytics = app.add_subcommand("analytics", "derived laws of a skip-free increment law");
    auto* codec = app.add_subcommand("codec", "tree<->sequence codec");
    auto* simulate = app.add_subcommand("simulate", "export one component ball");

    std::string codec_mode = "roundtrip";
    std::string tree_path, seq_path;
    codec->add_option("mode", codec_mode, "encode | decode | roundtrip");
    codec->add_option("--tree", tree_path, "tree text file (encode)");
    codec->add_option("--seq", seq_path, "whitespace-separated integers (decode)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*phase) return run_phase(ctx);
        if (*compare) return run_compare(ctx);
        if (*mtp) return run_mtp(ctx);
        if (*analytics) return run_analytics(ctx);
        if (*codec) return run_codec(ctx, codec_mode, tree_path, seq_path);
        if (*simulate) return run_simulate(ctx);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitConfig;
}
