"""Link-traversal execution of basic graph patterns.

A run starts from the query's constant IRIs, dereferences them, evaluates
the patterns incrementally over everything retrieved so far, and keeps
dereferencing whatever the active setup's policy designates until nothing
new is reachable.  Six setups:

* ``base``      — speculative frontier: subject/object IRIs of any retrieved
                  triple that unifies with at least one pattern.
* ``select``    — lean frontier: only IRIs the evaluator actually binds to a
                  query variable in a join-consistent partial solution.
* ``seealso``   — base plus rdfs:seeAlso targets of query-relevant subjects.
* ``sameas``    — base plus owl:sameAs endpoints touching anything
                  query-relevant, with answers canonicalized over the merged
                  equivalence classes.
* ``rhodf``     — select plus vocabulary lookups (query predicates, classes
                  of rdf:type patterns, and the same positions of matched
                  triples) with the RDFS-fragment closure applied.
* ``combined``  — the lean frontier carrying every extension at once.

Query relevance means: a seed constant, a value bound by the evaluator, or
anything owl:sameAs-equivalent to one of those.

Answers are recomputed over the finalized store when traversal ends; that
final pass is the authoritative result set, so late equivalence merges can
never leave a stale answer in place.  For a fixed fixture web and an
untruncated run, the reachable-document closure is order-independent, which
makes Results, HTTP, Retrieved, and Inferred deterministic even though
fetches run in parallel.
"""

from __future__ import annotations

import logging
from collections import deque
from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .fetch import (
    Clock,
    DerefResult,
    DerefStatus,
    DereferenceManager,
    FetchConfig,
    RealClock,
    Resolver,
)
from .query import (
    BgpQuery,
    TriplePattern,
    Variable,
    binding_text,
    pattern_to_text,
    seed_iris,
    type_class_constants,
)
from .rdf import OWL_SAMEAS, RDF_TYPE, RDFS_SEEALSO, Iri, Term, Triple, term_to_text
from .reasoner import EquivalenceClasses, FinalState, ReasoningStore, canonical_triple

log = logging.getLogger(__name__)


class Setup(str, Enum):
    BASE = "base"
    SELECT = "select"
    SEEALSO = "seealso"
    SAMEAS = "sameas"
    RHODF = "rhodf"
    COMBINED = "combined"


ALL_SETUPS = tuple(Setup)


def uses_sameas(setup: Setup) -> bool:
    return setup in (Setup.SAMEAS, Setup.COMBINED)


def uses_rhodf(setup: Setup) -> bool:
    return setup in (Setup.RHODF, Setup.COMBINED)


def follows_seealso(setup: Setup) -> bool:
    return setup in (Setup.SEEALSO, Setup.COMBINED)


@dataclass(frozen=True, slots=True)
class EngineOptions:
    """Switches for deliberate deviations from the default policies."""

    deref_predicates: bool = False
    base_follows_all_triple_iris: bool = False
    extensions_on_select: bool = False

    def carrier_is_speculative(self, setup: Setup) -> bool:
        if setup == Setup.BASE:
            return True
        if setup in (Setup.SEEALSO, Setup.SAMEAS):
            return not self.extensions_on_select
        return False


def unify_triple(pattern: TriplePattern, triple: Triple) -> dict[str, Term] | None:
    """Bindings making the pattern equal the triple, or None."""
    out: dict[str, Term] = {}
    for pt, tt in zip(pattern.terms(), triple.terms()):
        if isinstance(pt, Variable):
            seen = out.get(pt.name)
            if seen is not None and seen != tt:
                return None
            out[pt.name] = tt
        elif pt != tt:
            return None
    return out


def canonical_pattern(pattern: TriplePattern, eq: EquivalenceClasses) -> TriplePattern:
    def canon(t):
        return eq.rep(t) if isinstance(t, Iri) else t

    s, p, o = canon(pattern.subject), canon(pattern.predicate), canon(pattern.object)
    if s is pattern.subject and p is pattern.predicate and o is pattern.object:
        return pattern
    return TriplePattern(s, p, o)


def plan_order(patterns: Sequence[TriplePattern]) -> tuple[TriplePattern, ...]:
    """Static join order: most constants first, stay connected, then text."""
    remaining = list(patterns)
    plan: list[TriplePattern] = []
    bound: set[str] = set()

    def consts(p: TriplePattern) -> int:
        return sum(1 for t in p.terms() if not isinstance(t, Variable))

    while remaining:
        def rank(p: TriplePattern):
            shared = len(p.variables() & bound) if plan else 0
            return (-shared, -consts(p), pattern_to_text(p))

        nxt = min(remaining, key=rank)
        plan.append(nxt)
        remaining.remove(nxt)
        bound |= nxt.variables()
    return tuple(plan)


def _bkey(b: Mapping[str, Term]) -> tuple:
    return tuple(sorted(b.items(), key=lambda kv: kv[0]))


def _join(parts: list[dict], matches: list[dict]) -> list[dict]:
    out = []
    for a in parts:
        for m in matches:
            for var, val in m.items():
                got = a.get(var)
                if got is not None and got != val:
                    break
            else:
                merged = dict(a)
                merged.update(m)
                out.append(merged)
    return out


@dataclass(slots=True)
class EvalDelta:
    values: list[tuple[Term, str]]          # newly bound (value, position-kind)
    solutions: list[dict[str, Term]]        # newly completed full bindings
    matched: list[Triple]                   # new triples unifying >=1 pattern


class IncrementalEvaluator:
    """Semi-naive evaluation of a BGP over a growing triple set.

    Partial solutions are prefixes of a fixed plan order; feeding more
    triples only ever adds matches, partials, and solutions.
    """

    def __init__(self, patterns: Sequence[TriplePattern]) -> None:
        self.plan = plan_order(patterns)
        k = len(self.plan)
        self._triples: set[Triple] = set()
        self._matches: list[list[dict]] = [[] for _ in range(k)]
        self._match_keys: list[set] = [set() for _ in range(k)]
        self._levels: list[list[dict]] = [[] for _ in range(k)]
        self._level_keys: list[set] = [set() for _ in range(k)]
        self._seen_values: set[tuple[Term, str]] = set()
        # After matching plan[:L+1], each variable's position kinds so far.
        self._kinds: list[dict[str, frozenset[str]]] = []
        acc: dict[str, set[str]] = {}
        for p in self.plan:
            for term, kind in ((p.subject, "so"), (p.predicate, "pred"), (p.object, "so")):
                if isinstance(term, Variable):
                    acc.setdefault(term.name, set()).add(kind)
            self._kinds.append({v: frozenset(ks) for v, ks in acc.items()})

    def add(self, triples: Iterable[Triple]) -> EvalDelta:
        k = len(self.plan)
        new_matches: list[list[dict]] = [[] for _ in range(k)]
        matched: list[Triple] = []
        for t in triples:
            if t in self._triples:
                continue
            self._triples.add(t)
            hit = False
            for i, pat in enumerate(self.plan):
                b = unify_triple(pat, t)
                if b is None:
                    continue
                hit = True
                key = _bkey(b)
                if key not in self._match_keys[i]:
                    self._match_keys[i].add(key)
                    new_matches[i].append(b)
            if hit:
                matched.append(t)
        deltas: list[list[dict]] = []
        for level in range(k):
            prior = self._levels[level - 1] if level else [{}]
            d_prev = deltas[level - 1] if level else []
            candidates = _join(prior, new_matches[level])
            candidates += _join(d_prev, self._matches[level])
            candidates += _join(d_prev, new_matches[level])
            accepted = []
            for b in candidates:
                key = _bkey(b)
                if key not in self._level_keys[level]:
                    self._level_keys[level].add(key)
                    accepted.append(b)
            deltas.append(accepted)
        for level in range(k):
            self._matches[level].extend(new_matches[level])
            self._levels[level].extend(deltas[level])
        values: list[tuple[Term, str]] = []
        for level, batch in enumerate(deltas):
            kinds = self._kinds[level]
            for b in batch:
                for var, val in b.items():
                    for kind in kinds.get(var, ()):
                        pair = (val, kind)
                        if pair not in self._seen_values:
                            self._seen_values.add(pair)
                            values.append(pair)
        return EvalDelta(values=values, solutions=deltas[-1] if k else [], matched=matched)


@dataclass(frozen=True, slots=True)
class Binding:
    """An answer: variable/term pairs, ordered by variable name."""

    pairs: tuple[tuple[str, Term], ...]

    @classmethod
    def of(cls, mapping: Mapping[str, Term]) -> "Binding":
        return cls(tuple(sorted(mapping.items(), key=lambda kv: kv[0])))

    def get(self, name: str) -> Term | None:
        for var, term in self.pairs:
            if var == name:
                return term
        return None

    def as_dict(self) -> dict[str, Term]:
        return dict(self.pairs)

    def as_dict_text(self) -> dict[str, str]:
        return {var: term_to_text(term) for var, term in self.pairs}

    def key(self) -> str:
        return binding_text(dict(self.pairs))


@dataclass(frozen=True, slots=True)
class QueryMetrics:
    results: int
    time_s: float
    first_s: float | None
    http_lookups: int
    retrieved_triples: int
    inferred_triples: int
    truncated: bool = False


@dataclass(frozen=True, slots=True)
class FetchEvent:
    iri: Iri
    reason: str
    status: DerefStatus
    http_status: int | None
    triples: int
    t_s: float
    elapsed_s: float


@dataclass(frozen=True, slots=True)
class QueryRun:
    query: BgpQuery
    setup: Setup
    options: EngineOptions
    answers: tuple[Binding, ...]
    metrics: QueryMetrics
    events: tuple[FetchEvent, ...]
    final: FinalState
    equiv: EquivalenceClasses

    def answer_keys(self) -> frozenset[str]:
        return frozenset(b.key() for b in self.answers)

    def retrieved_iris(self) -> tuple[Iri, ...]:
        return tuple(ev.iri for ev in self.events if ev.status == DerefStatus.OK)


def execute(
    query: BgpQuery,
    setup: Setup | str,
    resolver: Resolver,
    *,
    config: FetchConfig | None = None,
    options: EngineOptions | None = None,
    clock: Clock | None = None,
) -> QueryRun:
    setup = Setup(setup)
    opts = options or EngineOptions()
    cfg = config or FetchConfig()
    clk: Clock = clock or RealClock()
    store = ReasoningStore(use_sameas=uses_sameas(setup), use_rhodf=uses_rhodf(setup))
    manager = DereferenceManager(resolver, cfg, clk)
    speculative = opts.carrier_is_speculative(setup)
    t0 = clk.now()

    seeds = seed_iris(query)
    canon_pats: list[TriplePattern] = [canonical_pattern(p, store.equiv) for p in query.patterns]
    evaluator = IncrementalEvaluator(canon_pats)
    eq_version = store.equiv.version

    requested: set[str] = set()
    pending: deque[tuple[Iri, str]] = deque()
    events: list[FetchEvent] = []
    raw_seen: set[Triple] = set()
    raw_order: list[Triple] = []
    seealso_links: list[Triple] = []
    sameas_links: list[Triple] = []
    relevant_raw: set[Iri] = set()
    relevant_canon: set[Term] = set()
    emitted: set[tuple] = set()
    retrieved = 0
    truncated = False
    first_s: float | None = None
    proj_vars = tuple(sorted(set(query.projected)))

    def want(iri: Iri, reason: str) -> None:
        if iri.value not in requested:
            requested.add(iri.value)
            pending.append((iri, reason))

    def mark_relevant(iri: Iri) -> None:
        if iri not in relevant_raw:
            relevant_raw.add(iri)
            relevant_canon.add(store.canonical(iri))

    for s in seeds.entities:
        mark_relevant(s)
        want(s, "seed")
    if opts.deref_predicates:
        for p in seeds.predicates:
            want(p, "seed")
    if uses_rhodf(setup):
        for p in seeds.predicates:
            want(p, "vocab")
        for c in type_class_constants(query):
            want(c, "vocab")

    def scan_speculative(triples: Iterable[Triple]) -> None:
        for t in triples:
            ct = canonical_triple(t, store.equiv)
            if opts.base_follows_all_triple_iris or any(
                unify_triple(p, ct) is not None for p in canon_pats
            ):
                if isinstance(t.subject, Iri):
                    want(t.subject, "match")
                if isinstance(t.object, Iri):
                    want(t.object, "match")
                if opts.deref_predicates:
                    want(t.predicate, "match")

    def scan_links() -> None:
        if follows_seealso(setup):
            for t in seealso_links:
                if (
                    isinstance(t.subject, Iri)
                    and store.canonical(t.subject) in relevant_canon
                    and isinstance(t.object, Iri)
                ):
                    want(t.object, "seealso")
        if uses_sameas(setup):
            for t in sameas_links:
                if isinstance(t.subject, Iri) and isinstance(t.object, Iri):
                    if (
                        store.canonical(t.subject) in relevant_canon
                        or store.canonical(t.object) in relevant_canon
                    ):
                        want(t.subject, "sameas")
                        want(t.object, "sameas")
            for iri in list(relevant_raw):
                for member in store.equiv.members(iri):
                    want(member, "sameas")

    def consume_eval(delta: EvalDelta) -> None:
        nonlocal first_s
        for val, kind in delta.values:
            if not isinstance(val, Iri):
                continue
            mark_relevant(val)
            if not speculative and (kind == "so" or (kind == "pred" and opts.deref_predicates)):
                want(val, "binding")
        if uses_rhodf(setup):
            for mt in delta.matched:
                want(mt.predicate, "vocab")
                if mt.predicate == RDF_TYPE and isinstance(mt.object, Iri):
                    want(mt.object, "vocab")
        for sol in delta.solutions:
            key = tuple((v, sol[v]) for v in proj_vars)
            if key not in emitted:
                emitted.add(key)
                if first_s is None:
                    first_s = clk.now() - t0

    def process_doc(doc) -> None:
        nonlocal evaluator, retrieved, eq_version
        retrieved += len(doc.triples)
        fresh = [t for t in doc.triples if t not in raw_seen]
        for t in fresh:
            raw_seen.add(t)
            raw_order.append(t)
            if t.predicate == RDFS_SEEALSO:
                seealso_links.append(t)
            elif t.predicate == OWL_SAMEAS:
                sameas_links.append(t)
        delta = store.ingest(doc.triples)
        merged = store.take_rep_changed() or store.equiv.version != eq_version
        eq_version = store.equiv.version
        if merged:
            # The canonical world moved: rebuild patterns and evaluator
            # state under the new representatives and replay the store.
            canon_pats[:] = [canonical_pattern(p, store.equiv) for p in query.patterns]
            evaluator = IncrementalEvaluator(canon_pats)
            relevant_canon.clear()
            relevant_canon.update(store.canonical(i) for i in relevant_raw)
            if speculative:
                scan_speculative(raw_order)
            ev_delta = evaluator.add(store.all_triples())
        else:
            if speculative:
                scan_speculative(fresh)
            ev_delta = evaluator.add(delta)
        consume_eval(ev_delta)
        scan_links()

    with ThreadPoolExecutor(max_workers=cfg.max_parallel) as pool:
        in_flight: dict[Future, tuple[Iri, str]] = {}

        def launch() -> None:
            while pending:
                iri, reason = pending.popleft()
                in_flight[pool.submit(manager.dereference, iri)] = (iri, reason)

        launch()
        while in_flight:
            done, _ = wait(list(in_flight), return_when=FIRST_COMPLETED)
            for fut in done:
                iri, reason = in_flight.pop(fut)
                res: DerefResult = fut.result()
                if res.status == DerefStatus.SKIPPED:
                    truncated = True
                n = len(res.document.triples) if res.document else 0
                events.append(
                    FetchEvent(
                        iri=iri,
                        reason=reason,
                        status=res.status,
                        http_status=res.http_status,
                        triples=n,
                        t_s=clk.now() - t0,
                        elapsed_s=res.elapsed_s,
                    )
                )
                if res.status == DerefStatus.OK and res.document is not None:
                    process_doc(res.document)
            launch()

    final = store.finalize()
    final_pats = [canonical_pattern(p, store.equiv) for p in query.patterns]
    closing = IncrementalEvaluator(final_pats)
    end_delta = closing.add(final.triples)
    by_key: dict[str, Binding] = {}
    for sol in end_delta.solutions:
        b = Binding.of({v: sol[v] for v in proj_vars})
        by_key.setdefault(b.key(), b)
    answers = tuple(b for _, b in sorted(by_key.items()))
    metrics = QueryMetrics(
        results=len(answers),
        time_s=clk.now() - t0,
        first_s=first_s,
        http_lookups=manager.lookups_used,
        retrieved_triples=retrieved,
        inferred_triples=final.inferred_count,
        truncated=truncated,
    )
    return QueryRun(
        query=query,
        setup=setup,
        options=opts,
        answers=answers,
        metrics=metrics,
        events=tuple(events),
        final=final,
        equiv=store.equiv,
    )
