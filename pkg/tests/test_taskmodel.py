"""Terminology, query building and retrieval."""

from __future__ import annotations

import random

import pytest

from querydialog.taskmodel import (
    ACCEPTABLE,
    EMPTY,
    KEYWORD,
    METATERM,
    QUALIFIER,
    RESOURCE_TYPE,
    TOO_MANY,
    Document,
    DocumentStore,
    LaunchError,
    Query,
    RoleError,
    Terminology,
    TerminologyEntry,
    TerminologyError,
    add_term,
    evaluate_results,
    remove_term,
    suggest_related,
)


class TestTerminologyInvariants:
    def test_hierarchy_mutually_inverse(self, runtime):
        for entry in runtime.terminology:
            for nid in entry.narrower:
                assert entry.id in runtime.terminology.entry(nid).broader
            for bid in entry.broader:
                assert entry.id in runtime.terminology.entry(bid).narrower

    def test_links_stay_within_kind(self, runtime):
        for entry in runtime.terminology:
            for linked in entry.narrower + entry.broader:
                assert runtime.terminology.entry(linked).kind == entry.kind

    def test_narrower_then_broader_round_trip(self, runtime):
        """Exhaustive walk of the fixture hierarchy."""
        count = 0
        for entry in runtime.terminology:
            for narrow in suggest_related(runtime.terminology, entry, "narrower"):
                count += 1
                broaders = suggest_related(runtime.terminology, narrow, "broader")
                assert entry in broaders
        assert count > 0

    def test_cycle_detected(self):
        with pytest.raises(TerminologyError):
            Terminology(
                [
                    TerminologyEntry("a.mc", "a", KEYWORD, broader=("b.mc",), narrower=("b.mc",)),
                    TerminologyEntry("b.mc", "b", KEYWORD, broader=("a.mc",), narrower=("a.mc",)),
                ]
            )

    def test_scale(self, runtime):
        assert 250 <= len(runtime.terminology) <= 400


class TestQueryOps:
    def test_add_keyword(self, runtime):
        entry = runtime.terminology.entry("paludisme.mc")
        query = add_term(Query(), entry, KEYWORD)
        assert query.keywords == ("paludisme.mc",)
        assert query.canonical(runtime.terminology) == "motcle(paludisme)"

    def test_add_duplicate_is_idempotent(self, runtime):
        entry = runtime.terminology.entry("paludisme.mc")
        query = add_term(add_term(Query(), entry, KEYWORD), entry, KEYWORD)
        assert query.keywords == ("paludisme.mc",)

    def test_add_qualifier_reaches_figure_state(self, runtime):
        query = add_term(Query(), runtime.terminology.entry("paludisme.mc"), KEYWORD)
        query = add_term(query, runtime.terminology.entry("therapeutique.qu"), QUALIFIER)
        assert query.canonical(runtime.terminology) == "motcle(paludisme), qualificatif(thérapeutique)"

    def test_kind_mismatch_is_role_error(self, runtime):
        with pytest.raises(RoleError):
            add_term(Query(), runtime.terminology.entry("therapeutique.qu"), KEYWORD)

    def test_remove_then_add_identity(self, runtime):
        entry = runtime.terminology.entry("anorexie.mc")
        query = add_term(Query(), entry, KEYWORD)
        removed, did = remove_term(query, entry)
        assert did and removed.keywords == ()
        again = add_term(removed, entry, KEYWORD)
        assert again == query

    def test_remove_absent_notices(self, runtime):
        query, removed = remove_term(Query(), runtime.terminology.entry("anorexie.mc"))
        assert not removed and query == Query()


class TestSuggestRelated:
    def test_broader_of_gonarthrose(self, runtime):
        entry = runtime.terminology.entry("gonarthrose.mc")
        broaders = suggest_related(runtime.terminology, entry, "broader")
        assert [e.id for e in broaders] == ["arthralgie.mc"]

    def test_synonym_of_entry_without_any(self, runtime):
        entry = runtime.terminology.entry("glaucome.mc")
        assert suggest_related(runtime.terminology, entry, "synonym") == []

    def test_combine_pairs_with_other_keywords(self, runtime):
        query = Query(keywords=("paludisme.mc", "tendinite.mc"))
        entry = runtime.terminology.entry("paludisme.mc")
        combined = suggest_related(runtime.terminology, entry, "combine", query)
        assert [e.id for e in combined] == ["tendinite.mc"]


class TestRetrievalFixture:
    def test_figure_first_query_yields_eleven(self, runtime):
        query = Query(keywords=("paludisme.mc",), qualifiers=("therapeutique.qu",))
        docs = runtime.store.execute_query(query)
        assert len(docs) == 11

    def test_figure_final_query_yields_pcime(self, runtime):
        query = Query(
            keywords=("paludisme.mc", "therapeutique.mc"),
            qualifiers=("traitement-medicamenteux.qu",),
            resource_types=("patient.tr",),
        )
        docs = runtime.store.execute_query(query)
        assert len(docs) == 1
        assert docs[0].title.startswith("Modèle de chapitre pour les manuels PCIME")

    def test_empty_store(self, runtime):
        store = DocumentStore([], runtime.terminology)
        assert store.execute_query(Query(keywords=("paludisme.mc",))) == []

    def test_unlaunchable_query(self, runtime):
        with pytest.raises(LaunchError):
            runtime.store.execute_query(Query(qualifiers=("therapeutique.qu",)))

    def test_narrower_expansion_toggle(self, runtime):
        expanded = runtime.store.execute_query(Query(keywords=("paludisme.mc",)))
        exact = runtime.store.execute_query(Query(keywords=("paludisme.mc",), expand_narrower=False))
        assert {d.id for d in exact} <= {d.id for d in expanded}
        assert "p06" in {d.id for d in expanded}
        assert "p06" not in {d.id for d in exact}

    def test_ordering_exact_matches_first_then_id(self, runtime):
        docs = runtime.store.execute_query(Query(keywords=("paludisme.mc",)))
        exact = {d.id for d in docs if any(kw == "paludisme.mc" for kw, _ in d.indexed_terms)}
        seen_inexact = False
        for doc in docs:
            if doc.id in exact:
                assert not seen_inexact
            else:
                seen_inexact = True


class TestEvaluate:
    def test_breakpoints(self):
        assert evaluate_results(0) == EMPTY
        assert evaluate_results(1) == ACCEPTABLE
        assert evaluate_results(10) == ACCEPTABLE
        assert evaluate_results(11) == TOO_MANY

    def test_total_step_function(self):
        verdicts = [evaluate_results(n) for n in range(0, 40)]
        changes = [i for i in range(1, len(verdicts)) if verdicts[i] != verdicts[i - 1]]
        assert changes == [1, 11]

    def test_configurable_threshold(self):
        assert evaluate_results(11, too_many_threshold=20) == ACCEPTABLE

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            evaluate_results(-1)


# ---------------------------------------------------------------------------
# Randomized retrieval cases shared with the acceptance suite.


def random_world(rng: random.Random):
    """Small random terminology + corpus + query for oracle comparison."""
    roots = [f"r{i}.mc" for i in range(rng.randint(2, 5))]
    entries = []
    children = {}
    for rid in roots:
        kids = [f"{rid[:-3]}c{j}.mc" for j in range(rng.randint(0, 3))]
        children[rid] = kids
        entries.append(TerminologyEntry(rid, rid[:-3], KEYWORD, narrower=tuple(kids)))
        for kid in kids:
            entries.append(TerminologyEntry(kid, kid[:-3], KEYWORD, broader=(rid,)))
    qualifiers = [f"q{i}.qu" for i in range(3)]
    entries += [TerminologyEntry(q, q[:-3], QUALIFIER) for q in qualifiers]
    metaterms = [f"m{i}.mt" for i in range(2)]
    entries += [TerminologyEntry(m, m[:-3], METATERM) for m in metaterms]
    rtypes = [f"t{i}.tr" for i in range(2)]
    entries += [TerminologyEntry(t, t[:-3], RESOURCE_TYPE) for t in rtypes]
    terminology = Terminology(entries)

    keywords = [e.id for e in entries if e.kind == KEYWORD]
    docs = []
    for i in range(rng.randint(0, 200)):
        pairs = []
        for _ in range(rng.randint(1, 3)):
            kw = rng.choice(keywords)
            qu = rng.choice(qualifiers + [None, None])
            pairs.append((kw, qu))
        docs.append(
            Document(
                id=f"d{i:03d}",
                title=f"doc {i}",
                indexed_terms=tuple(pairs),
                metaterms=tuple(rng.sample(metaterms, rng.randint(0, 2))),
                resource_type=rng.choice(rtypes + [None]),
                audience=rng.choice(["patient", "medecin", None]),
            )
        )
    store = DocumentStore(docs, terminology)

    n_terms = rng.randint(1, 5)
    query = Query(
        keywords=tuple(rng.sample(keywords, min(rng.randint(1, 2), len(keywords)))),
        qualifiers=tuple(rng.sample(qualifiers, max(0, n_terms - 3))),
        metaterms=tuple(rng.sample(metaterms, rng.randint(0, 1))),
        resource_types=tuple(rng.sample(rtypes, rng.randint(0, 1))),
        expand_narrower=rng.random() < 0.8,
    )
    return terminology, store, query


def oracle_matches(terminology, doc, query):
    """Brute-force match predicate, straight from the conjunctive contract."""

    def satisfying(kw):
        accepted = {kw}
        if query.expand_narrower:
            stack = [kw]
            while stack:
                cur = stack.pop()
                for n in terminology.entry(cur).narrower:
                    if n not in accepted:
                        accepted.add(n)
                        stack.append(n)
        return accepted

    doc_kws = {k for k, _ in doc.indexed_terms}
    for kw in query.keywords:
        if not (satisfying(kw) & doc_kws):
            return False
    for qu in query.qualifiers:
        if not any(q == qu for _, q in doc.indexed_terms):
            return False
    for mt in query.metaterms:
        if mt not in doc.metaterms:
            return False
    for rt in query.resource_types:
        if doc.resource_type != rt:
            return False
    if query.audience is not None and doc.audience != query.audience:
        return False
    return True


def test_retrieval_matches_oracle_on_random_worlds():
    rng = random.Random(97)
    for _ in range(60):
        terminology, store, query = random_world(rng)
        got = {d.id for d in store.execute_query(query)}
        expected = {d.id for d in store.documents if oracle_matches(terminology, d, query)}
        assert got == expected


def test_monotonicity_on_random_worlds():
    rng = random.Random(1234)
    for _ in range(40):
        terminology, store, query = random_world(rng)
        base = len(store.execute_query(query))
        qualifiers = [e.id for e in terminology if e.kind == QUALIFIER]
        grown = Query(
            keywords=query.keywords,
            qualifiers=tuple(dict.fromkeys(query.qualifiers + (qualifiers[0],))),
            metaterms=query.metaterms,
            resource_types=query.resource_types,
            expand_narrower=query.expand_narrower,
        )
        assert len(store.execute_query(grown)) <= base
        if query.qualifiers:
            shrunk = Query(
                keywords=query.keywords,
                qualifiers=query.qualifiers[:-1],
                metaterms=query.metaterms,
                resource_types=query.resource_types,
                expand_narrower=query.expand_narrower,
            )
            assert len(store.execute_query(shrunk)) >= base


def test_hierarchy_broadening_gives_superset(runtime):
    narrow = Query(keywords=("gonarthrose.mc",))
    broad = Query(keywords=("arthralgie.mc",))
    narrow_ids = {d.id for d in runtime.store.execute_query(narrow)}
    broad_ids = {d.id for d in runtime.store.execute_query(broad)}
    assert narrow_ids <= broad_ids
