"""Inference support: owl:sameAs equivalence and a small RDFS fragment.

Two independent mechanisms, composable:

* ``EquivalenceClasses`` tracks owl:sameAs merges with a union-find whose
  representative is always the lexicographically least member, so the
  canonical form of a triple does not depend on merge order.

* ``rho_df_closure`` forward-chains six rules (subclass transitivity,
  subproperty transitivity, type propagation, triple rewriting, domain,
  range) to a fixpoint.  Schema triples are ordinary data: a subclass
  statement can itself be rewritten by a subproperty axiom.

``ReasoningStore`` combines both incrementally for the engine.  Its running
view is a stale-tolerant superset: when a late merge changes an IRI's
representative, previously produced forms stay in the view (they are sound
up to further canonicalization) and the affected raw triples are simply
re-canonicalized in.  ``finalize`` rebuilds the exact canonical store plus a
fresh closure; metrics and the authoritative answer pass use that.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .rdf import (
    OWL_SAMEAS,
    RDF_TYPE,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    Iri,
    Literal,
    Term,
    Triple,
)


class EquivalenceClasses:
    """Union-find over IRIs; the class representative is the least member."""

    def __init__(self) -> None:
        self._rep: dict[Iri, Iri] = {}
        self._members: dict[Iri, set[Iri]] = {}
        self.version = 0  # bumped on every effective merge

    def rep(self, iri: Iri) -> Iri:
        return self._rep.get(iri, iri)

    def members(self, iri: Iri) -> frozenset[Iri]:
        r = self.rep(iri)
        got = self._members.get(r)
        return frozenset(got) if got else frozenset((iri,))

    def classes(self) -> Iterator[frozenset[Iri]]:
        for members in self._members.values():
            yield frozenset(members)

    def merge(self, a: Iri, b: Iri) -> frozenset[Iri]:
        """Merge the classes of a and b; returns IRIs whose rep changed."""
        ra, rb = self.rep(a), self.rep(b)
        if ra == rb:
            # Same class already, but register singletons so members() is
            # consistent after e.g. merge(x, x) on a fresh IRI.
            if ra not in self._members:
                self._rep[a] = ra
                self._members[ra] = {a} if a == b else {a, b}
            return frozenset()
        self.version += 1
        winner, loser = (ra, rb) if ra.value < rb.value else (rb, ra)
        moved = self._members.pop(loser, {loser})
        group = self._members.setdefault(winner, {winner})
        group |= moved
        for m in (a, b):
            group.add(m)
        for m in moved | {a, b}:
            self._rep[m] = winner
        return frozenset(moved)


def canonical_term(term: Term, eq: EquivalenceClasses) -> Term:
    return eq.rep(term) if isinstance(term, Iri) else term


def canonical_triple(t: Triple, eq: EquivalenceClasses) -> Triple:
    s, p, o = canonical_term(t.subject, eq), eq.rep(t.predicate), canonical_term(t.object, eq)
    if s is t.subject and p is t.predicate and o is t.object:
        return t
    return Triple(s, p, o)


class _RhoChainer:
    """Semi-naive fixpoint over the six-rule fragment.

    Facts are indexed as they are admitted; each admitted fact fires every
    rule it can participate in, joining against the indexes.  Conclusions
    that would not form a valid triple (non-IRI predicate) are dropped; the
    range rule skips literal objects.
    """

    def __init__(self) -> None:
        self.facts: set[Triple] = set()
        self.rule_counts: Counter[str] = Counter()
        self._by_pred: dict[Iri, set[tuple[Term, Term]]] = {}
        self._subclass_out: dict[Term, set[Term]] = {}
        self._subclass_in: dict[Term, set[Term]] = {}
        self._subprop_out: dict[Term, set[Term]] = {}
        self._subprop_in: dict[Term, set[Term]] = {}
        self._instances: dict[Term, set[Term]] = {}
        self._domain_of: dict[Term, set[Term]] = {}
        self._range_of: dict[Term, set[Term]] = {}

    def add(self, triples: Iterable[Triple]) -> list[Triple]:
        """Admit triples, chase to fixpoint, return newly inferred facts."""
        queue: deque[tuple[Triple, str | None]] = deque()
        queued: set[Triple] = set()
        inferred: list[Triple] = []
        for t in triples:
            if t not in self.facts and t not in queued:
                queue.append((t, None))
                queued.add(t)
        while queue:
            fact, rule = queue.popleft()
            if fact in self.facts:
                continue
            self.facts.add(fact)
            if rule is not None:
                inferred.append(fact)
                self.rule_counts[rule] += 1
            self._index(fact)
            for conclusion, via in self._fire(fact):
                if conclusion not in self.facts and conclusion not in queued:
                    queue.append((conclusion, via))
                    queued.add(conclusion)
        return inferred

    def _index(self, t: Triple) -> None:
        s, p, o = t.terms()
        self._by_pred.setdefault(p, set()).add((s, o))
        if p == RDFS_SUBCLASSOF:
            self._subclass_out.setdefault(s, set()).add(o)
            self._subclass_in.setdefault(o, set()).add(s)
        elif p == RDFS_SUBPROPERTYOF:
            self._subprop_out.setdefault(s, set()).add(o)
            self._subprop_in.setdefault(o, set()).add(s)
        elif p == RDF_TYPE:
            self._instances.setdefault(o, set()).add(s)
        elif p == RDFS_DOMAIN:
            self._domain_of.setdefault(s, set()).add(o)
        elif p == RDFS_RANGE:
            self._range_of.setdefault(s, set()).add(o)

    def _fire(self, t: Triple) -> Iterator[tuple[Triple, str]]:
        s, p, o = t.terms()
        # Generic-data side of the rewrite/domain/range rules.
        for q in self._subprop_out.get(p, ()):
            if isinstance(q, Iri):
                yield Triple(s, q, o), "subproperty-rewrite"
        for c in self._domain_of.get(p, ()):
            yield Triple(s, RDF_TYPE, c), "domain"
        if not isinstance(o, Literal):
            for c in self._range_of.get(p, ()):
                yield Triple(o, RDF_TYPE, c), "range"
        # Schema side.
        if p == RDFS_SUBCLASSOF:
            for a in self._subclass_in.get(s, ()):
                yield Triple(a, RDFS_SUBCLASSOF, o), "subclass-transitivity"
            for b in self._subclass_out.get(o, ()):
                yield Triple(s, RDFS_SUBCLASSOF, b), "subclass-transitivity"
            for x in self._instances.get(s, ()):
                yield Triple(x, RDF_TYPE, o), "type-propagation"
        elif p == RDFS_SUBPROPERTYOF:
            for a in self._subprop_in.get(s, ()):
                yield Triple(a, RDFS_SUBPROPERTYOF, o), "subproperty-transitivity"
            for b in self._subprop_out.get(o, ()):
                yield Triple(s, RDFS_SUBPROPERTYOF, b), "subproperty-transitivity"
            if isinstance(o, Iri):
                for x, y in self._by_pred.get(s, ()) if isinstance(s, Iri) else ():
                    yield Triple(x, o, y), "subproperty-rewrite"
        elif p == RDF_TYPE:
            for b in self._subclass_out.get(o, ()):
                yield Triple(s, RDF_TYPE, b), "type-propagation"
        elif p == RDFS_DOMAIN:
            if isinstance(s, Iri):
                for x, _y in self._by_pred.get(s, ()):
                    yield Triple(x, RDF_TYPE, o), "domain"
        elif p == RDFS_RANGE:
            if isinstance(s, Iri):
                for _x, y in self._by_pred.get(s, ()):
                    if not isinstance(y, Literal):
                        yield Triple(y, RDF_TYPE, o), "range"


def rho_df_closure(triples: Iterable[Triple]) -> set[Triple]:
    """All facts derivable from ``triples`` that are not among them."""
    base = set(triples)
    chainer = _RhoChainer()
    chainer.add(base)
    return chainer.facts - base


@dataclass(frozen=True, slots=True)
class FinalState:
    """Exact canonical store after a run ends."""

    data: frozenset[Triple]
    inferred: frozenset[Triple]
    inferred_count: int

    @property
    def triples(self) -> frozenset[Triple]:
        return self.data | self.inferred


@dataclass
class ReasoningStore:
    """Incremental canonical+inferred view over a growing raw triple set."""

    use_sameas: bool = False
    use_rhodf: bool = False
    equiv: EquivalenceClasses = field(default_factory=EquivalenceClasses)

    def __post_init__(self) -> None:
        self._raw: set[Triple] = set()
        self._prior_iris: set[Iri] = set()
        self._view: set[Triple] = set()
        self._view_order: list[Triple] = []
        self._chainer = _RhoChainer()
        self._rep_changed = False

    def ingest(self, triples: Iterable[Triple]) -> list[Triple]:
        """Absorb raw triples; returns view additions (canonical + inferred)."""
        raw_new = []
        for t in triples:
            if t not in self._raw:
                self._raw.add(t)
                raw_new.append(t)
        stale = False
        if self.use_sameas:
            for t in raw_new:
                if t.predicate == OWL_SAMEAS and isinstance(t.subject, Iri) and isinstance(t.object, Iri):
                    moved = self.equiv.merge(t.subject, t.object)
                    if moved & self._prior_iris:
                        stale = True
        if stale:
            # A representative that already occurs in the view changed: the
            # old forms stay (sound), every raw triple is re-canonicalized so
            # the current forms are present too, and the engine is told to
            # rebuild its evaluator state from all_triples().
            self._rep_changed = True
            candidates = [canonical_triple(t, self.equiv) for t in self._raw]
        elif self.use_sameas:
            candidates = [canonical_triple(t, self.equiv) for t in raw_new]
        else:
            candidates = raw_new
        delta: list[Triple] = []
        for t in candidates:
            if t not in self._view:
                self._view.add(t)
                self._view_order.append(t)
                delta.append(t)
        if self.use_rhodf:
            for t in self._chainer.add(delta):
                if t not in self._view:
                    self._view.add(t)
                    self._view_order.append(t)
                    delta.append(t)
        for t in raw_new:
            for term in t.terms():
                if isinstance(term, Iri):
                    self._prior_iris.add(term)
        return delta

    def take_rep_changed(self) -> bool:
        changed, self._rep_changed = self._rep_changed, False
        return changed

    def all_triples(self) -> list[Triple]:
        return list(self._view_order)

    def raw_count(self) -> int:
        return len(self._raw)

    def canonical(self, term: Term) -> Term:
        return canonical_term(term, self.equiv)

    def rule_counts(self) -> Counter[str]:
        return Counter(self._chainer.rule_counts)

    def finalize(self) -> FinalState:
        """Rebuild the exact store under the final equivalences."""
        if self.use_sameas:
            data = frozenset(canonical_triple(t, self.equiv) for t in self._raw)
        else:
            data = frozenset(self._raw)
        inferred = frozenset(rho_df_closure(data)) if self.use_rhodf else frozenset()
        novel = (data | inferred) - self._raw
        return FinalState(data=data, inferred=inferred, inferred_count=len(novel))
