#include "haltlab/obs.hpp"

#include <algorithm>
#include <sstream>

#include "haltlab/errors.hpp"

namespace haltlab {

char obs_char(Obs v) {
    switch (v) {
    case Obs::Zero: return '0';
    case Obs::One: return '1';
    default: return '_';
    }
}

PartialObservation PartialObservation::make(EntryMap entries, TailKind tail,
                                            StepIndex one_from) {
    PartialObservation p;
    p.entries_ = std::move(entries);
    p.tail_ = tail;
    p.one_from_ = (tail == TailKind::OneFrom) ? one_from : 0;
    p.canonicalize();
    return p;
}

PartialObservation PartialObservation::make_checked(EntryMap entries, TailKind tail,
                                                    StepIndex one_from) {
    PartialObservation p = make(std::move(entries), tail, one_from);
    if (!p.is_monotone()) {
        throw ValidationError("observation violates the monotone-1 or tail invariant: " +
                              p.to_text());
    }
    return p;
}

PartialObservation PartialObservation::zero_prefix(StepIndex n) {
    EntryMap m;
    for (StepIndex k = 0; k < n; ++k) m[k] = false;
    return make(std::move(m), TailKind::Bottom);
}

PartialObservation PartialObservation::resolved_halting(StepIndex k) {
    EntryMap m;
    for (StepIndex i = 0; i < k; ++i) m[i] = false;
    return make(std::move(m), TailKind::OneFrom, k);
}

PartialObservation PartialObservation::zero_claim() {
    return make({}, TailKind::ZeroClaim);
}

void PartialObservation::canonicalize() {
    if (tail_ == TailKind::ZeroClaim) {
        // 0-entries are implied by the claim.
        for (auto it = entries_.begin(); it != entries_.end();) {
            it = it->second ? ++it : entries_.erase(it);
        }
        one_from_ = 0;
        return;
    }
    if (tail_ != TailKind::OneFrom) {
        one_from_ = 0;
        return;
    }
    // A 0-entry at or above the tail start shadows it; push the tail past
    // the last shadow, materializing the 1s the old tail stood for.
    StepIndex last_shadow = 0;
    bool any_shadow = false;
    for (const auto& [k, v] : entries_) {
        if (k >= one_from_ && !v) {
            any_shadow = true;
            last_shadow = std::max(last_shadow, k);
        }
    }
    if (any_shadow) {
        for (StepIndex k = one_from_; k <= last_shadow; ++k) {
            entries_.try_emplace(k, true);
        }
        one_from_ = last_shadow + 1;
    }
    // Absorb 1-entries the tail implies.
    for (auto it = entries_.lower_bound(one_from_); it != entries_.end();) {
        it = it->second ? entries_.erase(it) : ++it;
    }
    // Lower the tail through a contiguous run of 1-entries.
    while (one_from_ > 0) {
        auto it = entries_.find(one_from_ - 1);
        if (it == entries_.end() || !it->second) break;
        entries_.erase(it);
        --one_from_;
    }
}

Obs PartialObservation::lookup(StepIndex k) const {
    auto it = entries_.find(k);
    if (it != entries_.end()) return it->second ? Obs::One : Obs::Zero;
    switch (tail_) {
    case TailKind::ZeroClaim: return Obs::Zero;
    case TailKind::OneFrom: return k >= one_from_ ? Obs::One : Obs::Undefined;
    default: return Obs::Undefined;
    }
}

bool PartialObservation::is_monotone() const {
    bool seen_one = false;
    for (const auto& [k, v] : entries_) {
        (void)k;
        if (seen_one && !v) return false;
        seen_one = seen_one || v;
    }
    switch (tail_) {
    case TailKind::ZeroClaim:
        return !seen_one;
    case TailKind::OneFrom: {
        // Canonical form keeps only 0-entries below the tail start; a gap
        // (hole) between the last 0-entry run and the tail is still
        // monotone, but a 1-entry below the tail with a later 0 is not,
        // which the entry scan above already rejects. What remains to check
        // is that no defined 0 sits at or above one_from_ (canonicalize()
        // removed shadows, so entries here are all below one_from_).
        for (const auto& [k, v] : entries_) {
            if (k >= one_from_ && !v) return false;
            if (v && k < one_from_) {
                // A 1-entry strictly below the tail start followed by any
                // defined 0 below the tail breaks monotone-1; followed only
                // by holes it is monotone but non-canonical relative to the
                // stated tail invariant, so reject it from the domain.
                return false;
            }
        }
        return true;
    }
    default:
        return true;
    }
}

StepIndex PartialObservation::horizon() const {
    StepIndex h = 0;
    if (!entries_.empty()) h = entries_.rbegin()->first + 1;
    if (tail_ == TailKind::OneFrom) h = std::max(h, one_from_ + 1);
    return h;
}

bool leq(const PartialObservation& p, const PartialObservation& q) {
    for (const auto& [k, v] : p.entries()) {
        if (q.lookup(k) != (v ? Obs::One : Obs::Zero)) return false;
    }
    switch (p.tail()) {
    case TailKind::Bottom:
        return true;
    case TailKind::ZeroClaim: {
        if (q.tail() != TailKind::ZeroClaim) return false;
        for (const auto& [k, v] : q.entries()) {
            if (v && !p.entries().count(k)) return false;
        }
        return true;
    }
    case TailKind::OneFrom: {
        if (q.tail() != TailKind::OneFrom) return false;
        const StepIndex from = p.one_from();
        for (StepIndex k = from; k < q.one_from(); ++k) {
            if (p.entries().count(k)) continue;
            if (q.lookup(k) != Obs::One) return false;
        }
        for (const auto& [k, v] : q.entries()) {
            if (k >= from && !v && !p.entries().count(k)) return false;
        }
        return true;
    }
    }
    return false;
}

namespace {

// First index at which both lookups are defined and disagree, scanning the
// joint horizon; the horizon bound is sufficient because beyond it both
// values are pure tails.
std::optional<StepIndex> first_disagreement(const PartialObservation& a,
                                            const PartialObservation& b) {
    const StepIndex horizon = std::max(a.horizon(), b.horizon()) + 1;
    for (StepIndex k = 0; k <= horizon; ++k) {
        const Obs va = a.lookup(k);
        const Obs vb = b.lookup(k);
        if (va != Obs::Undefined && vb != Obs::Undefined && va != vb) return k;
    }
    return std::nullopt;
}

PartialObservation lub2(const PartialObservation& a, const PartialObservation& b) {
    TailKind tail = TailKind::Bottom;
    StepIndex one_from = 0;
    if (a.tail() == TailKind::Bottom) {
        tail = b.tail();
        one_from = b.one_from();
    } else if (b.tail() == TailKind::Bottom) {
        tail = a.tail();
        one_from = a.one_from();
    } else if (a.tail() == b.tail()) {
        tail = a.tail();
        one_from = std::min(a.one_from(), b.one_from());
    } else {
        auto clash = first_disagreement(a, b);
        // A ZeroClaim and a OneFrom tail always clash somewhere at or below
        // the joint horizon.
        throw ConflictError("incompatible tails", clash.value_or(std::max(a.one_from(), b.one_from())));
    }

    // Walk the union of entry keys in ascending order so the reported
    // conflict is the first one; tail-versus-tail clashes at non-entry
    // indices were handled in the reconciliation above.
    PartialObservation::EntryMap merged;
    auto ia = a.entries().begin();
    auto ib = b.entries().begin();
    while (ia != a.entries().end() || ib != b.entries().end()) {
        StepIndex k;
        if (ib == b.entries().end() || (ia != a.entries().end() && ia->first <= ib->first)) {
            k = ia->first;
        } else {
            k = ib->first;
        }
        const Obs va = a.lookup(k);
        const Obs vb = b.lookup(k);
        if (va != Obs::Undefined && vb != Obs::Undefined && va != vb) {
            throw ConflictError("conflicting defined values", k);
        }
        const Obs v = va != Obs::Undefined ? va : vb;
        if (v != Obs::Undefined) merged[k] = (v == Obs::One);
        if (ia != a.entries().end() && ia->first == k) ++ia;
        if (ib != b.entries().end() && ib->first == k) ++ib;
    }
    return PartialObservation::make(std::move(merged), tail, one_from);
}

} // namespace

PartialObservation lub(const std::vector<PartialObservation>& set) {
    PartialObservation acc = PartialObservation::bottom();
    for (const auto& p : set) acc = lub2(acc, p);
    return acc;
}

bool is_directed(const std::vector<PartialObservation>& set) {
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = i + 1; j < set.size(); ++j) {
            bool bounded = false;
            for (const auto& u : set) {
                if (leq(set[i], u) && leq(set[j], u)) {
                    bounded = true;
                    break;
                }
            }
            if (!bounded) return false;
        }
    }
    return true;
}

bool in_bounded_class(const PartialObservation& p, StepIndex bound) {
    if (p.tail() != TailKind::Bottom) return false;
    return p.entries().empty() || p.entries().rbegin()->first < bound;
}

std::string PartialObservation::to_text() const {
    std::ostringstream out;
    out << '[';
    if (!entries_.empty()) {
        const StepIndex last = entries_.rbegin()->first;
        for (StepIndex k = 0; k <= last; ++k) {
            if (k) out << ' ';
            out << obs_char(lookup(k));
        }
        out << ' ';
    }
    out << "| ";
    switch (tail_) {
    case TailKind::Bottom: out << "⊥"; break;
    case TailKind::ZeroClaim: out << "0…"; break;
    case TailKind::OneFrom: out << "1…@" << one_from_; break;
    }
    out << ']';
    return out.str();
}

PartialObservation PartialObservation::parse(const std::string& text) {
    std::string s = text;
    auto strip = [](std::string& str) {
        while (!str.empty() && (str.front() == ' ' || str.front() == '\t')) str.erase(str.begin());
        while (!str.empty() && (str.back() == ' ' || str.back() == '\t')) str.pop_back();
    };
    strip(s);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
        throw ParseError("observation literal must be bracketed: " + text);
    }
    s = s.substr(1, s.size() - 2);
    const auto bar = s.find('|');
    if (bar == std::string::npos) {
        throw ParseError("observation literal missing '|' tail separator: " + text);
    }
    std::string bits = s.substr(0, bar);
    std::string tail = s.substr(bar + 1);
    strip(bits);
    strip(tail);

    EntryMap entries;
    StepIndex index = 0;
    std::istringstream bit_stream(bits);
    std::string tok;
    while (bit_stream >> tok) {
        if (tok == "0") {
            entries[index] = false;
        } else if (tok == "1") {
            entries[index] = true;
        } else if (tok != "_") {
            throw ParseError("observation bit must be 0, 1 or _: '" + tok + "'");
        }
        ++index;
    }

    if (tail == "⊥" || tail == "bot") {
        return make_checked(std::move(entries), TailKind::Bottom);
    }
    if (tail == "0…" || tail == "0...") {
        return make_checked(std::move(entries), TailKind::ZeroClaim);
    }
    const std::string uni = "1…@";
    const std::string ascii = "1...@";
    std::string arg;
    if (tail.rfind(uni, 0) == 0) {
        arg = tail.substr(uni.size());
    } else if (tail.rfind(ascii, 0) == 0) {
        arg = tail.substr(ascii.size());
    } else {
        throw ParseError("unknown observation tail: '" + tail + "'");
    }
    try {
        const StepIndex from = std::stoull(arg);
        return make_checked(std::move(entries), TailKind::OneFrom, from);
    } catch (const std::logic_error&) {
        throw ParseError("bad tail start index: '" + arg + "'");
    }
}

} // namespace haltlab
