"""Template realization: anchor lines, injectivity, failure modes."""

from __future__ import annotations

import pytest

from querydialog.core import SYSTEM, DialogueMove, Proposition
from querydialog.generator import RealizationError, TemplateTable


def gen(runtime):
    return runtime.make_generator()


def inform(pred, *args):
    return DialogueMove(SYSTEM, "inform", Proposition(pred, args))


def suggest(pred, *args):
    return DialogueMove(SYSTEM, "suggest", Proposition(pred, args))


class TestAnchors:
    def test_result_report_with_specialization(self, runtime):
        moves = [inform("NombreResultats", 11), suggest("Specialiser")]
        text = gen(runtime).realize(moves)
        assert text == (
            "Alors Il y a dans cette liste 11 documents. "
            "Il y a trop de documents. On peut essayer des termes plus spécifiques."
        )

    def test_closing_question(self, runtime):
        move = DialogueMove(SYSTEM, "ask", runtime.registry.polar_question("Cloture"))
        assert gen(runtime).realize([move]) == "Est-ce que l'on s'arrête là ?"

    def test_understanding_echo_contains_content(self, runtime):
        move = DialogueMove(
            SYSTEM, "icm", Proposition("RequeteInitiale", ("paludisme",)),
            icm_level="understanding", icm_polarity="positive",
        )
        assert gen(runtime).realize([move]) == "Donc c'est paludisme ?"

    def test_terminology_ids_render_as_labels(self, runtime):
        text = gen(runtime).realize([suggest("AjoutMotCle", "therapeutique.mc")])
        assert text == "Alors On peut ajouter le mot clé thérapeutique."

    def test_echo_round_trip_keeps_term_labels(self, runtime):
        for term_id in ("paludisme.mc", "therapeutique.qu", "rhumatologie.mt"):
            label = runtime.terminology.label(term_id)
            move = DialogueMove(
                SYSTEM, "icm", Proposition("AjoutMotCle", (term_id,)),
                icm_level="semantic", icm_polarity="positive",
            )
            text = gen(runtime).realize_move(move)
            assert label in text


class TestFailureModes:
    def test_missing_slot_names_the_slot(self, runtime):
        table = TemplateTable(entries={"inform:NombreResultats": "Il y a {missing} documents."})
        from querydialog.generator import Generator

        generator = Generator(table, runtime.registry, runtime.terminology)
        with pytest.raises(RealizationError) as err:
            generator.realize([inform("NombreResultats", 3)])
        assert "missing" in str(err.value)

    def test_no_template_no_fallback(self, runtime):
        from querydialog.generator import Generator

        generator = Generator(TemplateTable(entries={}), runtime.registry, runtime.terminology)
        with pytest.raises(RealizationError):
            generator.realize([inform("NombreResultats", 3)])

    def test_empty_move_list(self, runtime):
        with pytest.raises(RealizationError):
            gen(runtime).realize([])

    def test_silent_templates_drop(self, runtime):
        moves = [
            DialogueMove(SYSTEM, "icm", Proposition("TypeRessource", ("patient",)),
                         icm_level="acceptance", icm_polarity="positive"),
            suggest("AjoutTypeRessource", "patient.tr"),
        ]
        text = gen(runtime).realize(moves)
        assert text == "On peut essayer d'ajouter des documents spécifiques pour les patients."


class TestInjectivity:
    def test_distinct_move_lists_realize_distinctly(self, runtime):
        """Injectivity over the acceptance corpus's move sequences."""
        corpus = [
            [inform("NombreResultats", 11), suggest("Specialiser")],
            [inform("NombreResultats", 1)],
            [inform("RecapRequete", "motcle(paludisme)")],
            [inform("RecapRequete", "motcle(paludisme), qualificatif(thérapeutique)")],
            [suggest("AjoutMotCle", "therapeutique.mc")],
            [suggest("AjoutMotCle", "tendinite.mc")],
            [suggest("RemplacementQualificatif", "therapeutique.qu", "traitement-medicamenteux.qu")],
            [inform("RequeteAjoutee")],
            [inform("SequenceTerminee")],
            [DialogueMove(SYSTEM, "ask", runtime.registry.wh_question("AjoutQualificatif"))],
            [DialogueMove(SYSTEM, "ask", runtime.registry.wh_question("AjoutMotCle"))],
            [DialogueMove(SYSTEM, "ask", runtime.registry.polar_question("AjoutAutreChose"))],
            [DialogueMove(SYSTEM, "ask", runtime.registry.polar_question("AutreRecherche"))],
            [DialogueMove(SYSTEM, "ask", runtime.registry.alt_question("TypeRessource"))],
            [inform("Definition", "qualificatif",
                    "Les qualificatifs sont des concepts généraux, qui peuvent être affiliés à un mot clé pour en préciser le sens.")],
            [inform("DocumentSelectionne", "Titre", "description")],
            [inform("TitresDocuments", "1. Titre")],
            [inform("LancementRequete"), inform("MemorisationRequete")],
        ]
        generator = gen(runtime)
        texts = [generator.realize(moves) for moves in corpus]
        assert len(set(texts)) == len(texts)


class TestTableParsing:
    def test_duplicate_key_rejected(self):
        from querydialog.generator import TemplateLoadError

        with pytest.raises(TemplateLoadError):
            TemplateTable.parse('template a "x"\ntemplate a "y"')

    def test_english_table_has_distinct_opener(self, runtime, runtime_en):
        fr = runtime.templates.lookup(["greet:Salutation"])
        en = runtime_en.templates.lookup(["greet:Salutation"])
        assert fr and en and fr != en


def test_every_registry_predicate_has_template_or_fallback(runtime, runtime_en):
    from querydialog.core import SYSTEM, DialogueMove, Proposition

    for table_runtime in (runtime, runtime_en):
        generator = table_runtime.make_generator()
        for spec in table_runtime.registry:
            for act in ("ask", "inform", "suggest"):
                prop = Proposition(spec.name, tuple("x" for _ in spec.args))
                keys = [f"{act}:{spec.name}", act]
                assert table_runtime.templates.lookup(keys) is not None, (act, spec.name)
