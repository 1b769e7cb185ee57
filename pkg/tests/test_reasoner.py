import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linkquery.fixturegen import naive_rho_closure, sameas_components
from linkquery.rdf import (
    OWL_SAMEAS,
    RDF_TYPE,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    Iri,
    Literal,
    Triple,
)
from linkquery.reasoner import (
    EquivalenceClasses,
    ReasoningStore,
    canonical_triple,
    rho_df_closure,
)

NS = "http://r.example/"
C = [Iri(NS + f"c{i}") for i in range(5)]
P = [Iri(NS + f"p{i}") for i in range(5)]
X = [Iri(NS + f"x{i}") for i in range(5)]


# -- the six rules, one by one ---------------------------------------------


def test_subclass_transitivity():
    data = {Triple(C[0], RDFS_SUBCLASSOF, C[1]), Triple(C[1], RDFS_SUBCLASSOF, C[2])}
    assert Triple(C[0], RDFS_SUBCLASSOF, C[2]) in rho_df_closure(data)


def test_subproperty_transitivity():
    data = {Triple(P[0], RDFS_SUBPROPERTYOF, P[1]), Triple(P[1], RDFS_SUBPROPERTYOF, P[2])}
    assert Triple(P[0], RDFS_SUBPROPERTYOF, P[2]) in rho_df_closure(data)


def test_type_propagation_along_subclass():
    data = {Triple(X[0], RDF_TYPE, C[0]), Triple(C[0], RDFS_SUBCLASSOF, C[1])}
    assert Triple(X[0], RDF_TYPE, C[1]) in rho_df_closure(data)


def test_triple_rewrite_along_subproperty():
    data = {Triple(X[0], P[0], X[1]), Triple(P[0], RDFS_SUBPROPERTYOF, P[1])}
    assert Triple(X[0], P[1], X[1]) in rho_df_closure(data)


def test_domain_rule():
    data = {Triple(X[0], P[0], X[1]), Triple(P[0], RDFS_DOMAIN, C[0])}
    assert Triple(X[0], RDF_TYPE, C[0]) in rho_df_closure(data)


def test_range_rule_skips_literal_objects():
    data = {
        Triple(X[0], P[0], X[1]),
        Triple(X[0], P[0], Literal("five")),
        Triple(P[0], RDFS_RANGE, C[0]),
    }
    out = rho_df_closure(data)
    assert Triple(X[1], RDF_TYPE, C[0]) in out
    assert all(not isinstance(t.subject, Literal) for t in out)


def test_non_iri_predicate_conclusions_are_dropped():
    # subPropertyOf with a literal super-property cannot produce triples
    data = {Triple(X[0], P[0], X[1]), Triple(P[0], RDFS_SUBPROPERTYOF, Literal("junk"))}
    assert rho_df_closure(data) == set()


def test_schema_triples_are_also_plain_data():
    # the rewrite rule applies to schema predicates like any other
    data = {
        Triple(C[0], RDFS_SUBCLASSOF, C[1]),
        Triple(RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF, P[0]),
    }
    assert Triple(C[0], P[0], C[1]) in rho_df_closure(data)


# -- random instances against the naive fixpoint oracle ---------------------


def _random_instance(rng: random.Random) -> set[Triple]:
    triples: set[Triple] = set()
    for _ in range(rng.randrange(8, 26)):
        kind = rng.randrange(6)
        if kind == 0:
            triples.add(Triple(rng.choice(C), RDFS_SUBCLASSOF, rng.choice(C)))
        elif kind == 1:
            triples.add(Triple(rng.choice(P), RDFS_SUBPROPERTYOF, rng.choice(P)))
        elif kind == 2:
            triples.add(Triple(rng.choice(X), RDF_TYPE, rng.choice(C)))
        elif kind == 3:
            triples.add(Triple(rng.choice(P), rng.choice([RDFS_DOMAIN, RDFS_RANGE]), rng.choice(C)))
        elif kind == 4:
            obj = rng.choice(X + [Literal("v"), Literal("w")])
            triples.add(Triple(rng.choice(X), rng.choice(P), obj))
        else:  # schema used as data / odd but legal combinations
            triples.add(Triple(rng.choice(P), rng.choice(P), rng.choice(C + P)))
    return triples


def test_closure_matches_naive_fixpoint_on_100_random_instances():
    rng = random.Random(20260819)
    for n in range(100):
        data = _random_instance(rng)
        assert rho_df_closure(data) == naive_rho_closure(data), f"instance {n}"


def test_closure_is_idempotent_and_monotone():
    rng = random.Random(7)
    for _ in range(30):
        data = _random_instance(rng)
        closed = rho_df_closure(data)
        assert rho_df_closure(data | closed) == set()
        subset = {t for t in data if rng.random() < 0.5}
        small = subset | rho_df_closure(subset)
        big = data | closed
        assert small <= big


def test_incremental_chaining_equals_batch_closure():
    rng = random.Random(99)
    for _ in range(20):
        data = sorted(_random_instance(rng), key=repr)
        rng.shuffle(data)
        store = ReasoningStore(use_rhodf=True)
        cut = rng.randrange(len(data) + 1)
        store.ingest(data[:cut])
        store.ingest(data[cut:])
        final = store.finalize()
        assert set(final.inferred) == naive_rho_closure(data)


# -- equivalence classes ------------------------------------------------------


def test_merge_picks_lexicographically_least_representative():
    eq = EquivalenceClasses()
    eq.merge(X[3], X[1])
    eq.merge(X[1], X[2])
    for i in (1, 2, 3):
        assert eq.rep(X[i]) == X[1]
    assert eq.members(X[2]) == frozenset({X[1], X[2], X[3]})
    assert eq.rep(X[0]) == X[0]
    assert eq.members(X[0]) == frozenset({X[0]})


def test_merge_returns_members_whose_representative_moved():
    eq = EquivalenceClasses()
    assert eq.merge(X[2], X[3]) == frozenset({X[3]})
    assert eq.merge(X[2], X[3]) == frozenset()
    # X1 wins over the existing {X2, X3} class: both move
    assert eq.merge(X[3], X[1]) == frozenset({X[2], X[3]})


def test_version_counts_only_effective_merges():
    eq = EquivalenceClasses()
    assert eq.version == 0
    eq.merge(X[0], X[1])
    assert eq.version == 1
    eq.merge(X[1], X[0])
    assert eq.version == 1


def test_rep_is_idempotent_and_order_insensitive_on_100_random_graphs():
    rng = random.Random(4242)
    nodes = [Iri(NS + f"n{i}") for i in range(12)]
    for _ in range(100):
        pairs = [
            (rng.choice(nodes), rng.choice(nodes)) for _ in range(rng.randrange(1, 15))
        ]
        oracle = sameas_components(pairs)
        reps = []
        for _ in range(3):
            order = pairs[:]
            rng.shuffle(order)
            eq = EquivalenceClasses()
            for a, b in order:
                eq.merge(a, b)
            for n in nodes:
                assert eq.rep(eq.rep(n)) == eq.rep(n)
            reps.append({n: eq.rep(n) for n in nodes})
        assert reps[0] == reps[1] == reps[2]
        for n in nodes:
            assert reps[0][n] == oracle.get(n, n)


@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=20))
def test_equivalence_classes_partition_property(pairs):
    nodes = [Iri(NS + f"m{i}") for i in range(10)]
    eq = EquivalenceClasses()
    for a, b in pairs:
        eq.merge(nodes[a], nodes[b])
    seen: set[Iri] = set()
    for cls in eq.classes():
        assert not (cls & seen), "classes must be disjoint"
        seen |= cls
        assert len({eq.rep(m) for m in cls}) == 1
        assert min(cls, key=lambda i: i.value) == eq.rep(next(iter(cls)))


# -- the canonicalizing store --------------------------------------------------


def test_store_canonicalizes_view_and_counts_rewrites():
    store = ReasoningStore(use_sameas=True)
    a, b = X[0], X[1]
    store.ingest([Triple(b, P[0], X[2])])
    store.ingest([Triple(a, OWL_SAMEAS, b)])  # a < b so b's facts move to a
    final = store.finalize()
    assert Triple(a, P[0], X[2]) in final.data
    assert all(t.subject != b for t in final.data)
    # raw had 2 distinct triples; the canonical store adds the rewritten one
    assert final.inferred_count == len((final.data | final.inferred) - {
        Triple(b, P[0], X[2]),
        Triple(a, OWL_SAMEAS, b),
    })
    assert final.inferred_count >= 1


def test_store_flags_stale_view_when_prior_triples_move():
    store = ReasoningStore(use_sameas=True)
    store.ingest([Triple(X[1], P[0], X[2])])
    assert store.take_rep_changed() is False
    store.ingest([Triple(X[0], OWL_SAMEAS, X[1])])
    assert store.take_rep_changed() is True
    assert store.take_rep_changed() is False, "flag is consumed on read"
    assert canonical_triple(Triple(X[1], P[0], X[2]), store.equiv) in store.all_triples()


def test_finalize_keeps_inferred_disjoint_from_data():
    store = ReasoningStore(use_rhodf=True)
    store.ingest(
        [
            Triple(X[0], RDF_TYPE, C[0]),
            Triple(C[0], RDFS_SUBCLASSOF, C[1]),
            Triple(X[0], RDF_TYPE, C[1]),  # already stated: must not be re-counted
        ]
    )
    final = store.finalize()
    assert final.data & final.inferred == frozenset()
    assert Triple(X[0], RDF_TYPE, C[1]) in final.data


def test_store_without_features_passes_data_through():
    store = ReasoningStore()
    data = [Triple(X[0], P[0], X[1]), Triple(X[0], OWL_SAMEAS, X[1])]
    store.ingest(data)
    final = store.finalize()
    assert final.data == frozenset(data)
    assert final.inferred == frozenset()
    assert final.inferred_count == 0
