#ifndef RECGRAPH_INCREMENTS_HPP
#define RECGRAPH_INCREMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <recgraph/rng.hpp>

namespace recgraph {

using Atom = std::pair<long long, double>; // (value, probability)

// Finite-support law on the integers. SkipFree demands support >= -1 with
// an atom at -1; GeneralInteger is accepted by the strict-record and
// climbing-point shifts.
struct IncrementLaw {
    enum class Kind { SkipFree, GeneralInteger };

    std::vector<Atom> atoms; // sorted by value, distinct, probs >= 0, sum 1
    Kind kind = Kind::SkipFree;

    static constexpr double kProbTol = 1e-12;

    void validate() const {
        if (atoms.empty()) throw std::invalid_argument("IncrementLaw: no atoms");
        double sum = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (atoms[i].second < 0.0)
                throw std::invalid_argument("IncrementLaw: negative probability");
            if (i > 0 && atoms[i].first <= atoms[i - 1].first)
                throw std::invalid_argument("IncrementLaw: values must be distinct and sorted");
            sum += atoms[i].second;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw std::invalid_argument("IncrementLaw: probabilities sum to " + std::to_string(sum));
        if (kind == Kind::SkipFree) {
            if (atoms.front().first != -1 || atoms.front().second <= 0.0)
                throw std::invalid_argument("IncrementLaw: skip-free law needs an atom at -1 with positive mass");
        }
    }

    double mean() const {
        double m = 0.0;
        for (const auto& [v, p] : atoms) m += static_cast<double>(v) * p;
        return m;
    }

    long long min_value() const { return atoms.front().first; }
    long long max_value() const { return atoms.back().first; }

    double prob_of(long long v) const {
        for (const auto& [val, p] : atoms)
            if (val == v) return p;
        return 0.0;
    }

    // P[X >= v]
    double tail_of(long long v) const {
        double t = 0.0;
        for (const auto& [val, p] : atoms)
            if (val >= v) t += p;
        return t;
    }

    long long sample(double u) const {
        double acc = 0.0;
        for (const auto& [v, p] : atoms) {
            acc += p;
            if (u < acc) return v;
        }
        return atoms.back().first;
    }
};

inline IncrementLaw make_law(std::vector<Atom> atoms,
                             IncrementLaw::Kind kind = IncrementLaw::Kind::SkipFree) {
    std::sort(atoms.begin(), atoms.end());
    IncrementLaw law{std::move(atoms), kind};
    law.validate();
    return law;
}

inline double mean_of(const IncrementLaw& law) { return law.mean(); }

// M/M/1 queue parameters for the embedded jump chain.
struct QueueChainParams {
    double lambda = 1.0;
    double mu = 2.0;

    void validate() const {
        if (!(lambda > 0.0) || !(mu > 0.0)) throw std::invalid_argument("QueueChainParams: rates must be positive");
        if (!(lambda < mu)) throw std::invalid_argument("QueueChainParams: requires lambda < mu");
    }

    double up_prob() const { return lambda / (lambda + mu); }
    double rho() const { return lambda / mu; }

    // Stationary law of the jump chain (number in system at state changes):
    // eta(0) = (1-rho)/2 ... derived below; eta(k) = eta(1) rho^{k-1}, k>=1,
    // with eta(1) = eta(0)/q, q = mu/(lambda+mu).
    double eta0() const {
        const double q = mu / (lambda + mu);
        return 1.0 / (1.0 + 1.0 / (q * (1.0 - rho())));
    }

    // Sample the stationary state by CDF inversion.
    long long sample_stationary(double u) const {
        const double e0 = eta0();
        if (u < e0) return 0;
        double acc = e0;
        const double q = mu / (lambda + mu);
        double pk = e0 / q; // eta(1)
        long long k = 1;
        while (true) {
            acc += pk;
            if (u < acc) return k;
            pk *= rho();
            ++k;
            if (k > 1'000'000) return k; // unreachable for u < 1
        }
    }
};

enum class ExtendDirection { Left, Right };

// Abstract increment source. `value_at` must be a pure function of the
// index for a fixed source state trajectory; sequential sources (the queue
// chain) materialize state as the window grows.
class IncrementSource {
public:
    virtual ~IncrementSource() = default;
    // Produce x_n for the next uncovered index in the given direction.
    // Called with consecutive indices only (n == hi for Right, n == lo-1 for Left).
    virtual long long produce(long long n) = 0;
    virtual bool can_produce(long long) const { return true; }
    // A.s. certified supremum of S over the entire past of every index, if
    // the generator provides one (the queue chain does: sup = N_0).
    virtual std::optional<long long> certified_past_sup() const { return std::nullopt; }
};

class IidSource final : public IncrementSource {
public:
    IidSource(IncrementLaw law, std::uint64_t seed) : law_(std::move(law)), seed_(seed) {
        law_.validate();
    }
    long long produce(long long n) override {
        return law_.sample(to_unit_double(hash2(seed_, static_cast<std::uint64_t>(n))));
    }

private:
    IncrementLaw law_;
    std::uint64_t seed_;
};

// Embedded jump chain of the M/M/1 queue, run stationary and two-sided.
// Z_n = -N_n, X_n = Z_{n+1} - Z_n in {-1,+1}. The stationary birth-death
// jump chain satisfies detailed balance, so backward steps use the same
// kernel as forward steps.
class QueueSource final : public IncrementSource {
public:
    QueueSource(QueueChainParams params, std::uint64_t seed) : params_(params), seed_(seed) {
        params_.validate();
        n0_ = params_.sample_stationary(to_unit_double(hash2(seed_, 0x51'700'000ULL)));
        right_state_ = n0_; // N at the right frontier (index hi)
        left_state_ = n0_;  // N at the left frontier (index lo)
    }

    long long produce(long long n) override {
        const double u = to_unit_double(hash2(seed_, static_cast<std::uint64_t>(n) ^ 0x9e3779b9ULL));
        if (n >= 0) {
            const long long next = step(right_state_, u);
            const long long x = -(next - right_state_);
            right_state_ = next;
            return x;
        }
        const long long prev = step(left_state_, u);
        const long long x = -(left_state_ - prev);
        left_state_ = prev;
        return x;
    }

    std::optional<long long> certified_past_sup() const override { return n0_; }

    long long n0() const { return n0_; }

private:
    long long step(long long state, double u) const {
        if (state == 0) return 1;
        return (u < params_.up_prob()) ? state + 1 : state - 1;
    }

    QueueChainParams params_;
    std::uint64_t seed_;
    long long n0_ = 0;
    long long right_state_ = 0;
    long long left_state_ = 0;
};

// Fixed finite sequence; extension past its range fails (window censoring).
class DeterministicSource final : public IncrementSource {
public:
    DeterministicSource(std::vector<long long> values, long long lo)
        : values_(std::move(values)), lo_(lo) {}

    long long produce(long long n) override {
        if (!can_produce(n))
            throw std::out_of_range("DeterministicSource: index outside fixed range");
        return values_[static_cast<std::size_t>(n - lo_)];
    }

    bool can_produce(long long n) const override {
        return n >= lo_ && n < lo_ + static_cast<long long>(values_.size());
    }

    long long lo() const { return lo_; }
    long long hi() const { return lo_ + static_cast<long long>(values_.size()); }

private:
    std::vector<long long> values_;
    long long lo_;
};

// Lazily extendable two-sided window of increments x_n, n in [lo, hi),
// with prefix sums S_n for n in [lo, hi], S_0 = 0. Single writer; freeze
// by only calling const members.
class TrajectoryWindow {
public:
    static constexpr long long kChunk = 4096;
    static constexpr long long kDefaultExtensionBudget = 1024; // chunks

    TrajectoryWindow(std::shared_ptr<IncrementSource> source,
                     long long extension_budget = kDefaultExtensionBudget,
                     bool skip_free = true)
        : source_(std::move(source)), budget_(extension_budget), skip_free_(skip_free) {}

    bool skip_free() const { return skip_free_; }

    long long lo() const { return -static_cast<long long>(left_.size()); }
    long long hi() const { return static_cast<long long>(right_.size()); }

    long long budget_remaining() const { return budget_; }
    std::optional<long long> certified_past_sup() const { return source_->certified_past_sup(); }

    // Grow until index n is inside [lo, hi); false if the budget (or a
    // deterministic source's range) does not allow it.
    bool ensure_index(long long n) {
        while (n >= hi()) {
            if (!extend(ExtendDirection::Right)) return false;
        }
        while (n < lo()) {
            if (!extend(ExtendDirection::Left)) return false;
        }
        return true;
    }

    bool contains(long long n) const { return n >= lo() && n < hi(); }

    long long x(long long n) const {
        if (!contains(n)) throw std::out_of_range("TrajectoryWindow::x: index outside window");
        return n >= 0 ? right_[static_cast<std::size_t>(n)]
                      : left_[static_cast<std::size_t>(-n - 1)];
    }

    // S_n, valid for n in [lo, hi].
    long long sum(long long n) const {
        if (n < lo() || n > hi()) throw std::out_of_range("TrajectoryWindow::sum: index outside window");
        if (n >= 0) return n == 0 ? 0 : sright_[static_cast<std::size_t>(n - 1)];
        return sleft_[static_cast<std::size_t>(-n - 1)];
    }

    std::shared_ptr<IncrementSource> source() const { return source_; }

private:
    bool extend(ExtendDirection dir) {
        bool& exhausted = (dir == ExtendDirection::Right) ? right_exhausted_ : left_exhausted_;
        if (exhausted || budget_ <= 0) return false;
        --budget_;
        if (dir == ExtendDirection::Right) {
            for (long long i = 0; i < kChunk; ++i) {
                const long long n = hi();
                if (!source_->can_produce(n)) { exhausted = true; break; }
                const long long v = source_->produce(n);
                right_.push_back(v);
                const long long prev = (n == 0) ? 0 : sright_.back();
                sright_.push_back(prev + v); // S_{n+1}
            }
        } else {
            for (long long i = 0; i < kChunk; ++i) {
                const long long n = lo() - 1;
                if (!source_->can_produce(n)) { exhausted = true; break; }
                const long long v = source_->produce(n);
                left_.push_back(v);
                const long long snext = (n + 1 == 0) ? 0 : sum(n + 1);
                sleft_.push_back(snext - v); // S_n
            }
        }
        return true;
    }

    std::shared_ptr<IncrementSource> source_;
    std::vector<long long> left_;    // x_{-1}, x_{-2}, ...
    std::vector<long long> right_;   // x_0, x_1, ...
    std::vector<long long> sleft_;   // S_{-1}, S_{-2}, ...
    std::vector<long long> sright_;  // S_1, S_2, ...
    long long budget_;
    bool skip_free_ = true;
    bool left_exhausted_ = false;
    bool right_exhausted_ = false;
};

inline TrajectoryWindow iid_window(const IncrementLaw& law, std::uint64_t seed,
                                   long long extension_budget = TrajectoryWindow::kDefaultExtensionBudget) {
    const bool sf = law.kind == IncrementLaw::Kind::SkipFree;
    return TrajectoryWindow(std::make_shared<IidSource>(law, seed), extension_budget, sf);
}

inline TrajectoryWindow queue_window(const QueueChainParams& params, std::uint64_t seed,
                                     long long extension_budget = TrajectoryWindow::kDefaultExtensionBudget) {
    return TrajectoryWindow(std::make_shared<QueueSource>(params, seed), extension_budget, true);
}

// Window over a fixed sequence x_n, n in [lo, lo+len). No stochastic
// extension; reads outside the range censor.
inline TrajectoryWindow deterministic_window(std::vector<long long> values, long long lo) {
    const long long len = static_cast<long long>(values.size());
    bool sf = true;
    for (long long v : values)
        if (v < -1) sf = false;
    auto src = std::make_shared<DeterministicSource>(std::move(values), lo);
    // Enough budget to materialize the whole fixed range, never more.
    TrajectoryWindow w(src, (len + 2 * TrajectoryWindow::kChunk) / TrajectoryWindow::kChunk + 2, sf);
    if (len > 0) {
        w.ensure_index(lo);
        w.ensure_index(lo + len - 1);
    }
    return w;
}

// y(j, k) = S_k - S_j = sum of x_l over l in [j, k).
inline long long partial_sum(const TrajectoryWindow& w, long long j, long long k) {
    if (j > k) throw std::invalid_argument("partial_sum: requires j <= k");
    return w.sum(k) - w.sum(j);
}

} // namespace recgraph

#endif
