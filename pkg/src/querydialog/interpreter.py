"""Language model: from a raw utterance to dialogue moves.

Three passes, mirroring the tri-partite front end: a lexical pass
(normalization), a semantic pass (terminology matching and discourse
markers), and a pragmatic pass (cue-pattern act classification against the
current dialogue context).

Markers and cue patterns live in per-language config files; no
morphological analysis is attempted, synonym lists in the terminology
absorb inflection variants.
"""

from __future__ import annotations

import re
import shlex
import unicodedata
from dataclasses import dataclass
from typing import Optional

from .core import (
    ALT,
    Action,
    NEGATIVE,
    POLAR,
    POSITIVE,
    USER,
    WH,
    ANY_SORT,
    TERM_SORT,
    DialogueMove,
    PredicateRegistry,
    Proposition,
    Question,
)
from . import taskmodel
from .taskmodel import Terminology, TerminologyEntry

# Relation tags a marker can signal (one lexicon entry per surface form).
MARKER_TAGS = frozenset(
    {
        "progression",
        "sequence",
        "first-answer",
        "collaborative",
        "cooperative",
        "additional-answer",
        "contrast",
        "correction",
        "abandon",
        "semantic-link",
    }
)

ROLE_PREDICATE = {
    taskmodel.KEYWORD: "AjoutMotCle",
    taskmodel.QUALIFIER: "AjoutQualificatif",
    taskmodel.METATERM: "AjoutMetaterme",
    taskmodel.RESOURCE_TYPE: "AjoutTypeRessource",
}

ORDINALS = {
    "premier": 1, "premiere": 1, "deuxieme": 2, "second": 2, "seconde": 2,
    "troisieme": 3, "quatrieme": 4, "cinquieme": 5, "sixieme": 6,
    "septieme": 7, "huitieme": 8, "neuvieme": 9, "dixieme": 10,
}

_ARTICLES = ("le", "la", "les", "l", "un", "une", "des", "du", "de")


class LexiconError(Exception):
    """Malformed marker lexicon or cue-pattern file."""


class EmptyUtterance(Exception):
    """Empty input; the engine answers with a repeat request."""


def normalize(text: str):
    """Lowercased, diacritic-folded, punctuation-split token list."""
    if not text or not text.strip():
        raise EmptyUtterance()
    folded = unicodedata.normalize("NFD", text.lower())
    folded = "".join(ch for ch in folded if not unicodedata.combining(ch))
    return [tok for tok in re.split(r"[^a-z0-9]+", folded) if tok]


def _foldtext(text: str) -> str:
    folded = unicodedata.normalize("NFD", text.lower())
    return " ".join(
        tok for tok in re.split(r"[^a-z0-9]+", "".join(ch for ch in folded if not unicodedata.combining(ch))) if tok
    )


@dataclass(frozen=True)
class MarkerLexicon:
    """Surface marker -> discourse relation tag."""

    entries: tuple = ()  # ((token tuple, tag), ...) longest first

    @staticmethod
    def parse(source: str) -> "MarkerLexicon":
        entries = []
        for lineno, raw in enumerate(source.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = shlex.split(line)
            if len(tokens) != 3 or tokens[0] != "marker":
                raise LexiconError(f"lexicon line {lineno}: expected marker \"surface\" tag")
            _, surface, tag = tokens
            if tag not in MARKER_TAGS:
                raise LexiconError(f"lexicon line {lineno}: unknown relation tag {tag!r}")
            entries.append((tuple(normalize(surface)), tag))
        entries.sort(key=lambda e: -len(e[0]))
        return MarkerLexicon(entries=tuple(entries))

    def scan(self, tokens) -> list:
        """(span, tag) for each marker occurrence, longest match first."""
        found = []
        taken = set()
        for i in range(len(tokens)):
            for surface, tag in self.entries:
                j = i + len(surface)
                if j <= len(tokens) and tuple(tokens[i:j]) == surface:
                    if any(k in taken for k in range(i, j)):
                        continue
                    found.append(((i, j), tag))
                    taken.update(range(i, j))
                    break
        return found

    def tags(self) -> frozenset:
        return frozenset(tag for _, tag in self.entries)


@dataclass(frozen=True)
class CuePattern:
    name: str
    regex: "re.Pattern"
    tag: str
    prefix: bool = False


@dataclass(frozen=True)
class CuePatterns:
    patterns: tuple = ()

    @staticmethod
    def parse(source: str) -> "CuePatterns":
        patterns = []
        for lineno, raw in enumerate(source.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = shlex.split(line)
            if tokens[0] != "pattern" or len(tokens) < 4:
                raise LexiconError(f"patterns line {lineno}: expected pattern name \"regex\" tag")
            name, regex, tag = tokens[1], tokens[2], tokens[3]
            prefix = "prefix" in tokens[4:]
            try:
                compiled = re.compile(regex)
            except re.error as exc:
                raise LexiconError(f"patterns line {lineno}: bad regex: {exc}") from None
            patterns.append(CuePattern(name=name, regex=compiled, tag=tag, prefix=prefix))
        return CuePatterns(patterns=tuple(patterns))


@dataclass(frozen=True)
class UtteranceAnalysis:
    tokens: tuple
    term_matches: tuple = ()  # ((start, end), entry, role)
    markers: tuple = ()  # ((start, end), tag)
    moves: tuple = ()


@dataclass(frozen=True)
class DialogueContext:
    """Slice of the information state the classifier is allowed to see."""

    qud: tuple = ()  # top last
    last_terms: tuple = ()  # terminology ids, most recent last
    open_documents: int = 0


def match_terms(tokens, terminology: Terminology) -> tuple:
    """Longest-match left-to-right terminology matching.

    Multi-word labels win over their sub-spans; homonym entries of different
    kinds yield one match per entry on the same span.
    """
    phrase_map: dict = {}
    max_len = 1
    for entry in terminology:
        for name in (entry.label, *entry.synonyms):
            toks = tuple(normalize(name)) if name.strip() else ()
            if not toks:
                continue
            phrase_map.setdefault(toks, []).append(entry)
            max_len = max(max_len, len(toks))
    for entries in phrase_map.values():
        entries.sort(key=lambda e: e.id)

    matches = []
    i = 0
    n = len(tokens)
    while i < n:
        hit = None
        for width in range(min(max_len, n - i), 0, -1):
            window = tuple(tokens[i : i + width])
            if window in phrase_map:
                hit = (i, i + width)
                break
        if hit is None:
            i += 1
            continue
        for entry in phrase_map[tuple(tokens[hit[0] : hit[1]])]:
            matches.append((hit, entry, entry.kind))
        i = hit[1]
    return tuple(matches)


class Interpreter:
    """Utterance -> UtteranceAnalysis with classified dialogue moves."""

    def __init__(
        self,
        registry: PredicateRegistry,
        terminology: Terminology,
        lexicon: MarkerLexicon,
        patterns: CuePatterns,
    ):
        self.registry = registry
        self.terminology = terminology
        self.lexicon = lexicon
        self.patterns = patterns

    # -- helpers ------------------------------------------------------------

    def _flags(self, markers) -> frozenset:
        flags = set()
        for _, tag in markers:
            if tag in ("correction", "abandon", "cooperative", "additional-answer"):
                flags.add(tag)
        return frozenset(flags)

    def _strip_articles(self, text: str) -> str:
        toks = text.split()
        while toks and toks[0] in _ARTICLES:
            toks = toks[1:]
        return " ".join(toks)

    def _entry_arg(self, entry: TerminologyEntry, sort: str):
        return entry.label if sort in (ANY_SORT,) else entry.id

    def _question_accepting(self, context: DialogueContext, entry: TerminologyEntry):
        """Topmost QUD question (or polar companion) a term can fill."""
        sorts = self.terminology.term_sorts(entry.id)
        for q in reversed(context.qud):
            target = q
            if q.kind == POLAR:
                spec = self.registry.spec(q.predicate)
                if spec.wh_companion:
                    target = self.registry.wh_question(spec.wh_companion)
                else:
                    continue
            if target.kind == ALT:
                continue
            if target.kind != WH:
                continue
            sort = target.abstracted_sort
            if sort == ANY_SORT or sort in sorts or (sort == TERM_SORT and TERM_SORT in sorts):
                return target
        for q in reversed(context.qud):
            if q.kind == ALT:
                for alt in q.alternatives:
                    if entry.id in alt.args or entry.label in alt.args:
                        return q
        return None

    def _instance(self, q: Question, entry: TerminologyEntry) -> Proposition:
        if q.kind == ALT:
            for alt in q.alternatives:
                if entry.id in alt.args or entry.label in alt.args:
                    return alt
            raise ValueError(f"{entry.id} is not an alternative of {q}")
        arg = self._entry_arg(entry, q.abstracted_sort)
        args = list(q.bound_args)
        args.insert(q.wh_index, arg)
        return Proposition(q.predicate, tuple(args))

    def _top_polar(self, context: DialogueContext) -> Optional[Question]:
        for q in reversed(context.qud):
            if q.kind == POLAR:
                return q
        return None

    def _lookup(self, text: str, kind: Optional[str] = None) -> Optional[TerminologyEntry]:
        text = self._strip_articles(text.strip())
        entry = self.terminology.lookup_label(text, kind)
        if entry is not None:
            return entry
        # fall back to a scan, markers and fillers may surround the term
        for _, e, _role in match_terms(normalize(text) if text else [], self.terminology):
            if kind is None or e.kind == kind:
                return e
        return None

    # -- pattern move builders ------------------------------------------------

    def _build_moves(self, tag: str, match, flags, context: DialogueContext):
        reg = self.registry
        make = lambda act, content: DialogueMove(USER, act, content, flags=flags)

        if tag == "greet":
            return [make("greet", Proposition("Salutation"))]
        if tag == "quit":
            return [make("quit", Proposition("Adieu"))]
        if tag in ("open-launch", "open-construction", "open-search"):
            action = {
                "open-launch": "LancementRequete",
                "open-construction": "ConstructionRequete",
                "open-search": "SequenceRecherche",
            }[tag]
            return [make("informIntent", Action(action))]
        if tag in ("polar-yes", "polar-no"):
            q = self._top_polar(context)
            if q is None:
                top = context.qud[-1] if context.qud else None
                if tag == "polar-no" and top is not None and top.kind == WH:
                    # "non" to an open slot question declines it
                    return [make("answer", Proposition("RefusQuestion", (top.predicate,)))]
                return None
            polarity = POSITIVE if tag == "polar-yes" else NEGATIVE
            return [make("answer", Proposition(q.predicate, q.bound_args, polarity))]
        if tag == "initial-request":
            rest = self._strip_articles(match.group(match.lastindex or 0))
            if not rest:
                return None
            return [make("answer", Proposition("RequeteInitiale", (rest,)))]
        if tag in ("add-keyword", "add-qualifier", "add-metaterm", "add-resource"):
            kind = {
                "add-keyword": taskmodel.KEYWORD,
                "add-qualifier": taskmodel.QUALIFIER,
                "add-metaterm": taskmodel.METATERM,
                "add-resource": taskmodel.RESOURCE_TYPE,
            }[tag]
            entry = self._lookup(match.group(match.lastindex or 0), kind)
            if entry is None:
                return None
            act = "suggest" if "cooperative" in flags else "inform"
            return [make(act, Proposition(ROLE_PREDICATE[kind], (entry.id,)))]
        if tag == "add-term":
            entry = self._lookup(match.group(match.lastindex or 0))
            if entry is None:
                return None
            act = "suggest" if "cooperative" in flags else "inform"
            return [make(act, Proposition(ROLE_PREDICATE[entry.kind], (entry.id,)))]
        if tag == "remove-term":
            entry = self._lookup(match.group(match.lastindex or 0))
            if entry is None:
                return None
            act = "suggest" if "cooperative" in flags else "inform"
            return [make(act, Proposition("SuppressionTermeRequete", (entry.id,)))]
        if tag == "remove-deixis":
            if not context.last_terms:
                return None
            return [make("inform", Proposition("SuppressionTermeRequete", (context.last_terms[-1],)))]
        if tag == "define-request":
            subject = self._strip_articles(match.group(match.lastindex or 0))
            if not subject:
                return None
            q = Question(
                kind=WH,
                predicate="Definition",
                bound_args=(subject,),
                abstracted_sort=ANY_SORT,
                wh_index=1,
            )
            return [make("requestInfo", q)]
        if tag == "explain-request":
            return [make("requestInfo", reg.polar_question("ExplicationSysteme"))]
        if tag == "synonym-request":
            entry = self._lookup(match.group(match.lastindex or 0))
            if entry is None:
                return None
            q = Question(
                kind=WH,
                predicate="TermeSynonyme",
                bound_args=(entry.id,),
                abstracted_sort=TERM_SORT,
                wh_index=1,
            )
            return [make("requestInfo", q)]
        if tag == "close-request":
            return [make("requestInfo", reg.polar_question("Cloture"))]
        if tag == "cancel-request":
            return [make("inform", Proposition("RechercheAnnulee"))]
        if tag == "select-document":
            word = match.group(match.lastindex or 0)
            number = ORDINALS.get(word) if not word.isdigit() else int(word)
            if number is None:
                return None
            return [make("answer", Proposition("SelectionDocument", (number,)))]
        if tag == "choose-alt":
            wanted = match.group(match.lastindex or 0).strip()
            for q in reversed(context.qud):
                if q.kind == ALT:
                    for alt in q.alternatives:
                        if any(wanted == _foldtext(str(a)) for a in alt.args):
                            return [make("answer", alt)]
            return None
        if tag == "choose-role":
            role_word = match.group(match.lastindex or 0).strip()
            kind = {
                "mot cle": taskmodel.KEYWORD,
                "qualificatif": taskmodel.QUALIFIER,
                "metaterme": taskmodel.METATERM,
                "type de ressource": taskmodel.RESOURCE_TYPE,
            }.get(role_word)
            if kind is None:
                return None
            predicate = ROLE_PREDICATE[kind]
            for q in reversed(context.qud):
                if q.kind == ALT:
                    for alt in q.alternatives:
                        if alt.predicate == predicate:
                            return [make("answer", alt)]
            return None
        raise LexiconError(f"unknown pattern tag {tag!r}")

    # -- main entry point -----------------------------------------------------

    def analyse(self, text: str, context: Optional[DialogueContext] = None) -> UtteranceAnalysis:
        context = context or DialogueContext()
        tokens = normalize(text)
        term_matches = match_terms(tokens, self.terminology)
        markers = tuple(self.lexicon.scan(tokens))
        flags = self._flags(markers)
        joined = " ".join(tokens)

        moves: list = []
        remainder = joined
        for pattern in self.patterns.patterns:
            if not pattern.prefix:
                continue
            m = pattern.regex.match(remainder)
            if m:
                built = self._build_moves(pattern.tag, m, flags, context)
                if built:
                    moves.extend(built)
                    remainder = remainder[m.end() :].strip()

        matched = False
        if remainder:
            for pattern in self.patterns.patterns:
                if pattern.prefix:
                    continue
                m = pattern.regex.search(remainder)
                if m is None:
                    continue
                built = self._build_moves(pattern.tag, m, flags, context)
                if built:
                    moves.extend(built)
                    matched = True
                    break
            if not matched:
                moves.extend(self._term_moves(tokens, term_matches, flags, context, joined))
        return UtteranceAnalysis(
            tokens=tuple(tokens), term_matches=term_matches, markers=markers, moves=tuple(moves)
        )

    def _term_moves(self, tokens, term_matches, flags, context: DialogueContext, joined: str):
        """Bare content: short answers against the QUD, else an initial request."""
        moves = []
        spans_done = set()
        for span, entry, _role in term_matches:
            if span in spans_done:
                continue
            entries_here = [e for s, e, _ in term_matches if s == span]
            target = None
            chosen = None
            for e in entries_here:
                target = self._question_accepting(context, e)
                if target is not None:
                    chosen = e
                    break
            if target is not None:
                prop = self._instance(target, chosen)
                act = "suggest" if "cooperative" in flags else "shortAnswer"
                moves.append(DialogueMove(USER, act, prop, flags=flags))
                spans_done.add(span)
        if moves:
            return moves
        # No question fits the terms: try a free-text question of the QUD.
        for q in reversed(context.qud):
            target = q
            if q.kind == POLAR:
                spec = self.registry.spec(q.predicate)
                if not spec.wh_companion:
                    continue
                target = self.registry.wh_question(spec.wh_companion)
            if target.kind == WH and target.abstracted_sort == ANY_SORT:
                args = list(target.bound_args)
                args.insert(target.wh_index, joined)
                return [DialogueMove(USER, "answer", Proposition(target.predicate, tuple(args)), flags=flags)]
        if term_matches:
            span, entry, _ = term_matches[0]
            return [
                DialogueMove(USER, "shortAnswer", Proposition("RequeteInitiale", (entry.label,)), flags=flags)
            ]
        return []
