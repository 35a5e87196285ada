"""Interpreter: normalization, terminology matching, act classification."""

from __future__ import annotations

import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from querydialog.core import NEGATIVE, Proposition, Question
from querydialog.interpreter import (
    DialogueContext,
    EmptyUtterance,
    match_terms,
    normalize,
    MARKER_TAGS,
)


def fold_oracle(text):
    """Independent character-wise fold table for the normalize oracle."""
    out = []
    for ch in text.lower():
        decomposed = unicodedata.normalize("NFD", ch)
        base = "".join(c for c in decomposed if not unicodedata.combining(c))
        out.append(base if (base.isalnum() and base.isascii()) else " ")
    return "".join(out).split()


class TestNormalize:
    def test_figure_line(self):
        assert normalize("Ajouter le qualificatif thérapeutique") == [
            "ajouter", "le", "qualificatif", "therapeutique",
        ]

    def test_empty_signals(self):
        with pytest.raises(EmptyUtterance):
            normalize("   ")

    def test_fold_oracle(self):
        for text in ("CHOLESTÉROL.", "Éè-ça va ?", "café, crème & sucre!", "Ça, c'est l'été"):
            assert normalize(text) == fold_oracle(text)

    @settings(max_examples=300, deadline=None)
    @given(st.text(min_size=1, max_size=60))
    def test_idempotent(self, text):
        try:
            once = normalize(text)
        except EmptyUtterance:
            return
        if not once:
            return
        assert normalize(" ".join(once)) == once


class TestMarkers:
    def test_every_relation_tag_covered(self, runtime):
        assert runtime.lexicon.tags() == MARKER_TAGS

    def test_scan_multiword_first(self, runtime):
        tokens = normalize("alors après on va chercher sur tendinite peut-être")
        tags = {tag for _, tag in runtime.lexicon.scan(tokens)}
        assert "sequence" in tags  # "alors après" wins over "alors"
        assert "cooperative" in tags  # "peut-être"

    def test_case_insensitive_after_normalization(self, runtime):
        tags = {tag for _, tag in runtime.lexicon.scan(normalize("PLUTÔT gonarthrose"))}
        assert tags == {"correction"}


class TestMatchTerms:
    def test_single_keyword(self, runtime):
        matches = match_terms(normalize("paludisme"), runtime.terminology)
        assert [(m[1].id, m[2]) for m in matches] == [("paludisme.mc", "keyword")]

    def test_empty(self, runtime):
        assert match_terms([], runtime.terminology) == ()

    def test_multiword_beats_tiling(self, runtime):
        """Oracle: enumerate all tilings, the max-span tiling must be chosen."""
        tokens = normalize("douleurs articulaires")
        matches = match_terms(tokens, runtime.terminology)
        spans = [m[0] for m in matches]
        assert (0, 2) in spans  # one two-token match, not two one-token ones
        assert all(s == (0, 2) for s in spans)

    def test_longest_then_leftmost(self, runtime):
        tokens = normalize("le paludisme et la tendinite")
        matches = match_terms(tokens, runtime.terminology)
        ids = [m[1].id for m in matches]
        assert ids == ["paludisme.mc", "tendinite.mc"]

    def test_synonym_match(self, runtime):
        matches = match_terms(normalize("la malaria"), runtime.terminology)
        assert matches and matches[0][1].id == "paludisme.mc"

    def test_spans_non_overlapping_per_entry_kind(self, runtime):
        tokens = normalize("paludisme thérapeutique douleurs articulaires")
        matches = match_terms(tokens, runtime.terminology)
        for kind in {m[2] for m in matches}:
            spans = sorted(m[0] for m in matches if m[2] == kind)
            for (a1, b1), (a2, b2) in zip(spans, spans[1:]):
                assert b1 <= a2 or (a1, b1) == (a2, b2)


def analyse(runtime, text, qud=()):
    interpreter = runtime.make_interpreter()
    return interpreter.analyse(text, DialogueContext(qud=tuple(qud)))


class TestClassify:
    def test_indirect_initial_request(self, runtime):
        analysis = analyse(
            runtime,
            "bonjour, je suis intéressé par tout ce qui est problème de cholestérol",
            qud=[runtime.registry.wh_question("RequeteInitiale")],
        )
        acts = [m.act for m in analysis.moves]
        assert acts == ["greet", "answer"]
        answer = analysis.moves[1]
        assert answer.content.predicate == "RequeteInitiale"
        assert "cholesterol" in answer.content.args[0]

    def test_bare_no_is_polar_answer(self, runtime):
        q = runtime.registry.polar_question("AjoutAutreChose")
        analysis = analyse(runtime, "non", qud=[q])
        (move,) = analysis.moves
        assert move.act == "answer"
        assert move.content == Proposition("AjoutAutreChose", (), NEGATIVE)

    def test_cooperative_suggest(self, runtime):
        q = runtime.registry.polar_question("AutreQuestion")
        analysis = analyse(runtime, "chercher sur tendinite peut-être", qud=[q])
        (move,) = analysis.moves
        assert move.act == "suggest"
        assert move.content == Proposition("AjoutMotCle", ("tendinite.mc",))
        assert "cooperative" in move.flags

    def test_bare_term_short_answer_against_qud(self, runtime):
        q = runtime.registry.wh_question("AjoutQualificatif")
        analysis = analyse(runtime, "thérapeutique", qud=[q])
        (move,) = analysis.moves
        assert move.act == "shortAnswer"
        assert move.content == Proposition("AjoutQualificatif", ("therapeutique.qu",))

    def test_correction_marker_flags_move(self, runtime):
        q = runtime.registry.wh_question("AjoutMetaterme")
        analysis = analyse(runtime, "plutôt rhumatologie", qud=[q])
        (move,) = analysis.moves
        assert "correction" in move.flags
        assert move.content == Proposition("AjoutMetaterme", ("rhumatologie.mt",))

    def test_abandon_marker(self, runtime):
        q = runtime.registry.wh_question("AjoutQualificatif")
        analysis = analyse(runtime, "sinon ajouter le qualificatif diagnostic", qud=[q])
        (move,) = analysis.moves
        assert "abandon" in move.flags

    def test_definition_request(self, runtime):
        analysis = analyse(runtime, "Qu'est-ce qu'un qualificatif ?")
        (move,) = analysis.moves
        assert move.act == "requestInfo"
        assert move.content.predicate == "Definition"
        assert move.content.bound_args == ("qualificatif",)

    def test_deixis_removal_resolves_most_recent_term(self, runtime):
        interpreter = runtime.make_interpreter()
        context = DialogueContext(last_terms=("paludisme.mc", "anorexie.mc"))
        analysis = interpreter.analyse("alors on va enlever ce mot-clé là", context)
        (move,) = analysis.moves
        assert move.content == Proposition("SuppressionTermeRequete", ("anorexie.mc",))

    def test_multiple_short_answers(self, runtime):
        q = runtime.registry.wh_question("RequeteInitiale")
        analysis = analyse(runtime, "par rapport aux articulations en fait, douleurs articulaires et autres", qud=[q])
        contents = [m.content.args[0] for m in analysis.moves]
        assert len(analysis.moves) >= 2
        assert any("articulation" in c for c in contents)

    def test_unknown_move_total(self, runtime):
        analysis = analyse(runtime, "xyzzy blorp")
        assert analysis.moves == ()


class TestFixtureFile:
    def test_every_move_constructible_and_total(self, runtime):
        """Over the 200-utterance fixture every move's content is registered."""
        from importlib import resources

        text = resources.files("querydialog.data").joinpath("utterances_fr.txt").read_text("utf-8")
        lines = [l for l in text.splitlines() if l.strip()]
        assert len(lines) == 200
        interpreter = runtime.make_interpreter()
        contexts = [
            DialogueContext(),
            DialogueContext(qud=(runtime.registry.wh_question("RequeteInitiale"),)),
            DialogueContext(
                qud=(
                    runtime.registry.wh_question("AjoutQualificatif"),
                    runtime.registry.polar_question("AjoutAutreChose"),
                ),
                last_terms=("paludisme.mc",),
            ),
        ]
        for line in lines:
            for context in contexts:
                try:
                    analysis = interpreter.analyse(line, context)
                except EmptyUtterance:
                    continue
                # totality: a move list (possibly empty = unknown-move signal)
                assert isinstance(analysis.moves, tuple)
                for move in analysis.moves:
                    content = move.content
                    if isinstance(content, Proposition):
                        runtime.registry.check(content)
                    elif isinstance(content, Question):
                        runtime.registry.spec(content.predicate)
