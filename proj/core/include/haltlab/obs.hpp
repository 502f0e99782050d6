#pragma once

// The domain of partial halting observations: partial functions
// N -> {0, 1, undefined} under the extension order, with symbolic tails so
// that fully-resolved observations of halting machines stay finitely
// representable.
//
// Lookup semantics: the value at k is the explicit entry if present,
// otherwise the tail's value (Bottom: undefined everywhere; ZeroClaim: 0
// everywhere; OneFrom(K): 1 for k >= K, undefined below K).
//
// Canonical form absorbs entries the tail already implies and lowers a
// OneFrom tail through a contiguous run of 1-entries. Values produced by
// fixture builders and parsers additionally satisfy the monotone-1 law
// (a 1 is never followed by a defined 0); values produced by applying the
// observation operator to machine-inconsistent inputs may fall outside the
// monotone fragment, which is checkable via is_monotone().

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "haltlab/machine.hpp"

namespace haltlab {

enum class Obs : std::uint8_t { Undefined = 0, Zero = 1, One = 2 };

char obs_char(Obs v);

enum class TailKind : std::uint8_t { Bottom = 0, ZeroClaim = 1, OneFrom = 2 };

class PartialObservation {
public:
    using EntryMap = std::map<StepIndex, bool>;

    PartialObservation() = default; // bottom

    static PartialObservation bottom() { return PartialObservation(); }

    // Entries plus tail, canonicalized but not validated: use for operator
    // outputs and exhaustive enumerations.
    static PartialObservation make(EntryMap entries, TailKind tail, StepIndex one_from = 0);

    // Same as make() but rejects values outside the domain (monotone-1 or
    // tail invariant violations). Use for fixtures and parsed input.
    static PartialObservation make_checked(EntryMap entries, TailKind tail,
                                           StepIndex one_from = 0);

    // 0 at indices 0..n-1, undefined beyond.
    static PartialObservation zero_prefix(StepIndex n);

    // 0 at indices 0..k-1, 1 from k on: the fully-resolved observation of a
    // machine whose exact halting step is k.
    static PartialObservation resolved_halting(StepIndex k);

    // Total all-zeros observation. Carries no proof; a claim, not a fact.
    static PartialObservation zero_claim();

    // Text form: `[b0 b1 ... | tail]` with `_` for holes and tail one of
    // `⊥`, `0…`, `1…@K` (ASCII spellings bot / 0... / 1...@K accepted).
    static PartialObservation parse(const std::string& text);
    std::string to_text() const;

    Obs lookup(StepIndex k) const;

    const EntryMap& entries() const { return entries_; }
    TailKind tail() const { return tail_; }
    StepIndex one_from() const { return one_from_; }

    bool is_bottom() const { return entries_.empty() && tail_ == TailKind::Bottom; }

    // Domain membership: lookups never show a 1 followed by a defined 0,
    // and tail invariants hold (no 1-entry under a ZeroClaim, entries below
    // a OneFrom(K) tail all 0).
    bool is_monotone() const;

    // Number of explicitly defined finite positions (tail not counted).
    std::size_t entry_count() const { return entries_.size(); }

    // Largest index that must be inspected to distinguish this value:
    // max entry key + 1, and at least one_from + 1 for OneFrom tails.
    StepIndex horizon() const;

    bool operator==(const PartialObservation&) const = default;

private:
    EntryMap entries_;
    TailKind tail_ = TailKind::Bottom;
    StepIndex one_from_ = 0;

    void canonicalize();
};

// Extension order: q extends p iff q agrees with p everywhere p is defined.
bool leq(const PartialObservation& p, const PartialObservation& q);

// Least upper bound of a compatible finite set. Throws ConflictError naming
// the first conflicting index when two members disagree on a defined value
// or carry irreconcilable tails.
PartialObservation lub(const std::vector<PartialObservation>& set);

// True iff every pair of members has an upper bound inside the set.
bool is_directed(const std::vector<PartialObservation>& set);

// Membership in the bounded class B_T: defined set within {0..T-1} and no
// tail information.
bool in_bounded_class(const PartialObservation& p, StepIndex bound);

} // namespace haltlab
