"""Content algebra and information-state unit tests.

The QUD stack is checked against an independent reference implementation
(plain Python lists) over randomized operation sequences.
"""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from querydialog.core import (
    ALT,
    NEGATIVE,
    POLAR,
    POSITIVE,
    WH,
    AccommodationRequired,
    EngineError,
    InformationState,
    PredicateRegistry,
    PredicateSpec,
    Proposition,
    Question,
    QUD_MAX_DEPTH,
    RegistryError,
    commit,
    default_term_sorts,
    downdate,
    raise_question,
    resolves,
)

REGISTRY = PredicateRegistry(
    [
        PredicateSpec("AjoutMotCle", (("m", "motcle"),), multi_answer=True),
        PredicateSpec("AjoutMetaterme", (("t", "metaterme"),)),
        PredicateSpec("TypeRessource", (("a", "audience"),)),
        PredicateSpec("RequeteInitiale", (("t", "texte"),), multi_answer=True),
        PredicateSpec("Demarches", (("d", "texte"),), multi_answer=True),
        PredicateSpec("Cloture"),
        PredicateSpec("Precisions", wh_companion="Demarches"),
    ],
    {"audience": ("patient", "médecin")},
)


def wh(name, multi=None):
    q = REGISTRY.wh_question(name)
    if multi is not None:
        q = Question(
            kind=q.kind,
            predicate=q.predicate,
            bound_args=q.bound_args,
            abstracted_sort=q.abstracted_sort,
            wh_index=q.wh_index,
            multi_answer=multi,
        )
    return q


class TestQuestionInvariants:
    def test_wh_requires_sort(self):
        with pytest.raises(ValueError):
            Question(kind=WH, predicate="AjoutMotCle")

    def test_polar_cannot_abstract(self):
        with pytest.raises(ValueError):
            Question(kind=POLAR, predicate="Cloture", abstracted_sort="texte")

    def test_alt_needs_two_alternatives(self):
        with pytest.raises(ValueError):
            Question(kind=ALT, predicate="TypeRessource", alternatives=(Proposition("TypeRessource", ("patient",)),))

    def test_multi_answer_only_wh(self):
        with pytest.raises(ValueError):
            Question(kind=POLAR, predicate="Cloture", multi_answer=True)


class TestResolves:
    def test_keyword_answer_resolves_keyword_question(self):
        # §-level anchor: a suggested keyword answers the open add-keyword question
        answer = Proposition("AjoutMotCle", ("tendinite.mc",))
        assert resolves(answer, wh("AjoutMotCle"), REGISTRY)

    def test_polar_resolved_by_own_predicate(self):
        assert resolves(Proposition("Cloture", (), POSITIVE), REGISTRY.polar_question("Cloture"), REGISTRY)
        assert resolves(Proposition("Cloture", (), NEGATIVE), REGISTRY.polar_question("Cloture"), REGISTRY)

    def test_wrong_predicate_does_not_resolve(self):
        answer = Proposition("TypeRessource", ("patient",))
        assert not resolves(answer, wh("AjoutMotCle"), REGISTRY)

    def test_alt_membership(self):
        q = REGISTRY.alt_question("TypeRessource")
        assert resolves(Proposition("TypeRessource", ("patient",)), q, REGISTRY)
        assert not resolves(Proposition("TypeRessource", ("infirmier",)), q, REGISTRY)

    def test_unknown_predicate_raises(self):
        with pytest.raises(RegistryError):
            resolves(Proposition("Inconnu", ("x",)), wh("AjoutMotCle"), REGISTRY)

    def test_exhaustive_sort_matching_oracle(self):
        """Brute-force check of resolves over the whole fixture registry."""
        terms = ["tendinite.mc", "rhumatologie.mt", "patient", "médecin", "libre", "3"]
        unary = [s for s in REGISTRY if s.arity == 1]
        for spec in unary:
            question = REGISTRY.wh_question(spec.name)
            for other in unary:
                for term in terms:
                    answer = Proposition(other.name, (term,))
                    got = resolves(answer, question, REGISTRY)
                    sort = question.abstracted_sort
                    expected = other.name == spec.name and (
                        sort == "texte" or sort in default_term_sorts(term)
                    )
                    assert got == expected, (spec.name, other.name, term)

    def test_purity(self):
        answer = Proposition("AjoutMotCle", ("tendinite.mc",))
        q = wh("AjoutMotCle")
        results = {resolves(answer, q, REGISTRY) for _ in range(10_000)}
        assert results == {True}


class TestRaise:
    def test_push_on_empty(self):
        state = raise_question(InformationState(), wh("AjoutMotCle"))
        assert state.shared.qud == (wh("AjoutMotCle"),)
        assert state.shared.issues == (wh("AjoutMotCle"),)

    def test_duplicate_top_is_noop(self):
        q = wh("AjoutMotCle")
        state = raise_question(raise_question(InformationState(), q), q)
        assert len(state.shared.qud) == 1

    def test_stack_order_against_reference(self):
        q1 = REGISTRY.polar_question("Cloture")
        q2 = wh("RequeteInitiale")
        state = raise_question(raise_question(InformationState(), q1), q2)
        # reference: plain list, top last
        assert list(state.shared.qud) == [q1, q2]
        assert state.qud_top == q2

    def test_depth_cap(self):
        state = InformationState()
        for i in range(QUD_MAX_DEPTH):
            state = raise_question(state, Question(kind=POLAR, predicate="Cloture", bound_args=(str(i),)))
        with pytest.raises(EngineError):
            raise_question(state, Question(kind=POLAR, predicate="Cloture", bound_args=("x",)))


class TestDowndate:
    def test_multi_answer_keeps_question_open(self):
        # the donor-organs pattern: two resolving answers, question stays open
        q = wh("Demarches")
        state = raise_question(InformationState(), q)
        state = downdate(state, q, Proposition("Demarches", ("démarches donneur",)), REGISTRY)
        state = downdate(state, q, Proposition("Demarches", ("examens à passer",)), REGISTRY)
        assert q in state.shared.qud
        assert len(state.committed("Demarches")) == 2

    def test_single_answer_pops(self):
        q = REGISTRY.polar_question("Cloture")
        state = raise_question(InformationState(), q)
        state = downdate(state, q, Proposition("Cloture"), REGISTRY)
        assert q not in state.shared.qud
        assert q not in state.shared.issues

    def test_second_answer_is_a_correction(self):
        # the metaterm pattern: a second answer replaces the first
        q = wh("AjoutMetaterme")
        state = raise_question(InformationState(), q)
        state = downdate(state, q, Proposition("AjoutMetaterme", ("nutrition.mt",)), REGISTRY)
        state = raise_question(state, q)
        state = downdate(state, q, Proposition("AjoutMetaterme", ("rhumatologie.mt",)), REGISTRY)
        committed = state.committed("AjoutMetaterme")
        assert committed == (Proposition("AjoutMetaterme", ("rhumatologie.mt",)),)

    def test_absent_question_signals_accommodation(self):
        q = wh("AjoutMotCle")
        with pytest.raises(AccommodationRequired):
            downdate(InformationState(), q, Proposition("AjoutMotCle", ("tendinite.mc",)), REGISTRY)


class TestCommit:
    def test_contradiction_latest_wins(self):
        state = commit(InformationState(), Proposition("Cloture"))
        state = commit(state, Proposition("Cloture", (), NEGATIVE))
        assert state.shared.commitments == (Proposition("Cloture", (), NEGATIVE),)

    def test_no_contradiction_pair_ever(self):
        state = InformationState()
        for pol in (POSITIVE, NEGATIVE, POSITIVE, NEGATIVE):
            state = commit(state, Proposition("Cloture", (), pol))
            preds = [(p.predicate, p.args) for p in state.shared.commitments]
            assert len(preds) == len(set(preds))


# ---------------------------------------------------------------------------
# Stack-discipline oracle: replay randomized sequences on a reference stack.


class ReferenceStack:
    """Independent list model of the QUD discipline."""

    def __init__(self):
        self.items = []

    def raise_(self, q):
        if self.items and self.items[-1] == q:
            return
        self.items = [x for x in self.items if x != q] + [q]

    def downdate(self, q, multi):
        if q not in self.items:
            return False
        if not multi:
            self.items = [x for x in self.items if x != q]
        return True


QUESTION_POOL = [
    REGISTRY.polar_question("Cloture"),
    REGISTRY.polar_question("Precisions"),
    wh("AjoutMotCle"),
    wh("AjoutMetaterme"),
    wh("RequeteInitiale"),
    wh("Demarches"),
    REGISTRY.alt_question("TypeRessource"),
]

ANSWER_FOR = {
    "Cloture": Proposition("Cloture"),
    "Precisions": Proposition("Precisions"),
    "AjoutMotCle": Proposition("AjoutMotCle", ("tendinite.mc",)),
    "AjoutMetaterme": Proposition("AjoutMetaterme", ("rhumatologie.mt",)),
    "RequeteInitiale": Proposition("RequeteInitiale", ("paludisme",)),
    "Demarches": Proposition("Demarches", ("examens",)),
    "TypeRessource": Proposition("TypeRessource", ("patient",)),
}


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(st.sampled_from(["raise", "downdate"]), st.integers(0, len(QUESTION_POOL) - 1)),
        min_size=1,
        max_size=100,
    )
)
def test_stack_oracle_equivalence(ops):
    state = InformationState()
    reference = ReferenceStack()
    for op, idx in ops:
        q = QUESTION_POOL[idx]
        if op == "raise":
            state = raise_question(state, q)
            reference.raise_(q)
        else:
            answer = ANSWER_FOR[q.predicate]
            if q in state.shared.qud:
                state = downdate(state, q, answer, REGISTRY)
            reference.downdate(q, q.multi_answer)
    assert list(state.shared.qud) == reference.items


def test_stack_oracle_long_run():
    """At least 10^4 randomized steps replayed against the reference."""
    import random

    rng = random.Random(20260809)
    state = InformationState()
    reference = ReferenceStack()
    steps = 0
    for _ in range(12_000):
        q = QUESTION_POOL[rng.randrange(len(QUESTION_POOL))]
        if rng.random() < 0.6:
            state = raise_question(state, q)
            reference.raise_(q)
        else:
            if q in state.shared.qud:
                state = downdate(state, q, ANSWER_FOR[q.predicate], REGISTRY)
            reference.downdate(q, q.multi_answer)
        steps += 1
        assert list(state.shared.qud) == reference.items
    assert steps >= 10_000
