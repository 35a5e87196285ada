"""Task side of the system: terminology index, query builder and retrieval.

The terminology is a small controlled vocabulary with four kinds of entries
(keywords, qualifiers, metaterms, resource types), synonym lists and an
acyclic broader/narrower hierarchy.  Queries are conjunctive: a document
matches when every keyword (or one of its narrower descendants), every
qualifier, every metaterm and every resource-type/audience constraint is
satisfied.  Retrieval runs on an inverted index; the brute-force scan kept
in the tests is the oracle it is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .core import TERM_SORT, default_term_sorts

KEYWORD = "keyword"
QUALIFIER = "qualifier"
METATERM = "metaterm"
RESOURCE_TYPE = "resource-type"

KINDS = (KEYWORD, QUALIFIER, METATERM, RESOURCE_TYPE)

KIND_SORT = {
    KEYWORD: "motcle",
    QUALIFIER: "qualificatif",
    METATERM: "metaterme",
    RESOURCE_TYPE: "typeressource",
}

# Canonical one-line query rendering uses these field tags.
KIND_TAG = {
    KEYWORD: "motcle",
    QUALIFIER: "qualificatif",
    METATERM: "metaterme",
    RESOURCE_TYPE: "type_ressource",
}


class TerminologyError(Exception):
    """Malformed terminology source or broken hierarchy invariant."""


class RoleError(Exception):
    """Entry kind incompatible with the requested query role."""


class LaunchError(Exception):
    """Query not launchable (no keyword or metaterm)."""


@dataclass(frozen=True)
class TerminologyEntry:
    id: str
    label: str
    kind: str
    synonyms: tuple = ()
    broader: tuple = ()
    narrower: tuple = ()
    associated_qualifiers: tuple = ()  # keyword entries only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise TerminologyError(f"{self.id}: unknown kind {self.kind!r}")


class Terminology:
    """Immutable lookup structure over terminology entries."""

    def __init__(self, entries: Iterable[TerminologyEntry]):
        self._entries = {e.id: e for e in entries}
        self._by_label: dict = {}
        for e in self._entries.values():
            for name in (e.label, *e.synonyms):
                self._by_label.setdefault(_fold(name), []).append(e)
        self._check()

    def _check(self) -> None:
        for e in self._entries.values():
            for bid in e.broader:
                b = self._entries.get(bid)
                if b is None:
                    raise TerminologyError(f"{e.id}: unknown broader link {bid}")
                if b.kind != e.kind:
                    raise TerminologyError(f"{e.id}: broader link {bid} crosses kinds")
                if e.id not in b.narrower:
                    raise TerminologyError(f"{e.id}: broader/narrower not mutually inverse with {bid}")
            for nid in e.narrower:
                n = self._entries.get(nid)
                if n is None:
                    raise TerminologyError(f"{e.id}: unknown narrower link {nid}")
                if e.id not in n.broader:
                    raise TerminologyError(f"{e.id}: broader/narrower not mutually inverse with {nid}")
            for qid in e.associated_qualifiers:
                q = self._entries.get(qid)
                if q is None or q.kind != QUALIFIER:
                    raise TerminologyError(f"{e.id}: bad associated qualifier {qid}")
        # hierarchy must be acyclic
        seen: dict = {}
        for e in self._entries.values():
            self._descend(e.id, seen, ())

    def _descend(self, eid: str, seen: dict, path: tuple):
        if eid in path:
            cycle = path[path.index(eid):] + (eid,)
            raise TerminologyError("hierarchy cycle: " + " -> ".join(cycle))
        if seen.get(eid):
            return
        for nid in self._entries[eid].narrower:
            self._descend(nid, seen, path + (eid,))
        seen[eid] = True

    def __contains__(self, eid: str) -> bool:
        return eid in self._entries

    def __iter__(self):
        return iter(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def entry(self, eid: str) -> TerminologyEntry:
        try:
            return self._entries[eid]
        except KeyError:
            raise TerminologyError(f"unknown terminology id {eid!r}") from None

    def label(self, eid: str) -> str:
        return self.entry(eid).label

    def lookup_label(self, text: str, kind: Optional[str] = None) -> Optional[TerminologyEntry]:
        """Entry whose label or synonym matches ``text`` (fold-insensitive)."""
        candidates = self._by_label.get(_fold(text), [])
        for e in candidates:
            if kind is None or e.kind == kind:
                return e
        return None

    def descendants(self, eid: str) -> frozenset:
        """All transitive narrower ids, excluding ``eid`` itself."""
        result: set = set()
        stack = list(self.entry(eid).narrower)
        while stack:
            nid = stack.pop()
            if nid in result:
                continue
            result.add(nid)
            stack.extend(self.entry(nid).narrower)
        return frozenset(result)

    def term_sorts(self, term) -> frozenset:
        """Sort resolver wired into ``core.resolves`` for this vocabulary."""
        sorts = set(default_term_sorts(term))
        entry = None
        term = str(term)
        if term in self._entries:
            entry = self._entries[term]
        else:
            entry = self.lookup_label(term)
        if entry is not None:
            sorts.add(TERM_SORT)
            sorts.add(KIND_SORT[entry.kind])
            if entry.kind == RESOURCE_TYPE and entry.id in ("patient.tr", "medecin.tr"):
                sorts.add("audience")
        if term in ("patient", "medecin", "médecin"):
            sorts.add("audience")
        return frozenset(sorts)


def _fold(text: str) -> str:
    import unicodedata

    decomposed = unicodedata.normalize("NFD", text.lower())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch)).strip()


# ---------------------------------------------------------------------------
# Query


ROLE_FOR_KIND = {k: k for k in KINDS}


@dataclass(frozen=True)
class Query:
    """Structured conjunctive search query over terminology ids.

    Field tuples behave as ordered sets (insertion order, no duplicates) so
    the canonical rendering is stable.  ``expand_narrower`` switches keyword
    expansion over narrower descendants.
    """

    keywords: tuple = ()
    qualifiers: tuple = ()
    metaterms: tuple = ()
    resource_types: tuple = ()
    audience: Optional[str] = None
    expand_narrower: bool = True

    def terms(self) -> tuple:
        return self.keywords + self.qualifiers + self.metaterms + self.resource_types

    @property
    def launchable(self) -> bool:
        return bool(self.keywords or self.metaterms)

    def canonical(self, terminology: Terminology) -> str:
        """One-line rendering: ``motcle(paludisme), qualificatif(thérapeutique)``."""
        parts = []
        for kind, ids in (
            (KEYWORD, self.keywords),
            (QUALIFIER, self.qualifiers),
            (METATERM, self.metaterms),
            (RESOURCE_TYPE, self.resource_types),
        ):
            for eid in ids:
                parts.append(f"{KIND_TAG[kind]}({terminology.label(eid)})")
        return ", ".join(parts)


_FIELD_FOR_KIND = {
    KEYWORD: "keywords",
    QUALIFIER: "qualifiers",
    METATERM: "metaterms",
    RESOURCE_TYPE: "resource_types",
}


def add_term(query: Query, entry: TerminologyEntry, role: str) -> Query:
    """Add ``entry`` under ``role``; idempotent on duplicates.

    The role must match the entry's kind, otherwise a RoleError drives a
    clarification move upstream.
    """
    if role not in _FIELD_FOR_KIND:
        raise RoleError(f"unknown role {role!r}")
    if entry.kind != role:
        raise RoleError(f"{entry.label} is a {entry.kind}, not a {role}")
    fieldname = _FIELD_FOR_KIND[role]
    current = getattr(query, fieldname)
    if entry.id in current:
        return query
    return replace(query, **{fieldname: current + (entry.id,)})


def remove_term(query: Query, entry: TerminologyEntry) -> tuple:
    """Remove ``entry`` wherever it occurs; returns (query, removed flag)."""
    removed = False
    updates = {}
    for fieldname in _FIELD_FOR_KIND.values():
        current = getattr(query, fieldname)
        if entry.id in current:
            updates[fieldname] = tuple(x for x in current if x != entry.id)
            removed = True
    if not removed:
        return query, False
    return replace(query, **updates), True


def suggest_related(
    terminology: Terminology,
    entry: TerminologyEntry,
    direction: str,
    query: Optional[Query] = None,
) -> list:
    """Refinement proposals around ``entry``.

    broader/narrower follow one hierarchy level; synonym returns the entry's
    other labels; combine pairs the entry with each other current query
    keyword.  The result may be empty.
    """
    if direction == "broader":
        return [terminology.entry(b) for b in entry.broader]
    if direction == "narrower":
        return [terminology.entry(n) for n in entry.narrower]
    if direction == "synonym":
        return list(entry.synonyms)
    if direction == "combine":
        if query is None:
            return []
        return [
            terminology.entry(k)
            for k in query.keywords
            if k != entry.id
        ]
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# Documents and retrieval


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    description: str = ""
    indexed_terms: tuple = ()  # ((keyword id, qualifier id or None), ...)
    metaterms: tuple = ()
    resource_type: Optional[str] = None
    audience: Optional[str] = None


class DocumentStore:
    """Catalog slice with an inverted keyword index."""

    def __init__(self, documents: Iterable[Document], terminology: Terminology):
        self.documents = tuple(documents)
        self.terminology = terminology
        for doc in self.documents:
            for kw, qu in doc.indexed_terms:
                if kw not in terminology:
                    raise TerminologyError(f"document {doc.id}: unknown keyword {kw}")
                if qu is not None and qu not in terminology:
                    raise TerminologyError(f"document {doc.id}: unknown qualifier {qu}")
            for mt in doc.metaterms:
                if mt not in terminology:
                    raise TerminologyError(f"document {doc.id}: unknown metaterm {mt}")
        self._by_keyword: dict = {}
        for doc in self.documents:
            for kw, _qu in doc.indexed_terms:
                self._by_keyword.setdefault(kw, set()).add(doc.id)
        self._by_id = {d.id: d for d in self.documents}

    def __len__(self) -> int:
        return len(self.documents)

    def document(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    def _candidates(self, keyword_id: str, expand: bool) -> tuple:
        """Doc ids indexed under the keyword, and its satisfying keyword set."""
        accepted = {keyword_id}
        if expand:
            accepted |= self.terminology.descendants(keyword_id)
        ids: set = set()
        for kw in accepted:
            ids |= self._by_keyword.get(kw, set())
        return ids, accepted

    def execute_query(self, query: Query) -> list:
        """Conjunctive retrieval, ordered by exact keyword matches then id.

        A document matches iff every query keyword is satisfied directly or
        (when expansion is on) through a narrower descendant, every qualifier
        pairs with at least one matching keyword occurrence, and metaterm,
        resource-type and audience constraints hold exactly.
        """
        if not query.launchable:
            raise LaunchError("query needs at least one keyword or metaterm")
        candidate_ids: Optional[set] = None
        accepted_sets = {}
        for kw in query.keywords:
            ids, accepted = self._candidates(kw, query.expand_narrower)
            accepted_sets[kw] = accepted
            candidate_ids = ids if candidate_ids is None else candidate_ids & ids
        if candidate_ids is None:
            candidate_ids = set(self._by_id)

        results = []
        for doc_id in candidate_ids:
            doc = self._by_id[doc_id]
            if self._matches(doc, query, accepted_sets):
                results.append(doc)
        results.sort(key=lambda d: (-self._exact_matches(d, query), d.id))
        return results

    def _matches(self, doc: Document, query: Query, accepted_sets: dict) -> bool:
        doc_keywords = {kw for kw, _ in doc.indexed_terms}
        for kw in query.keywords:
            if not (accepted_sets[kw] & doc_keywords):
                return False
        # Qualifiers float over the document: each must appear on at least
        # one indexed keyword pairing (keyword removal then stays monotone).
        for qu in query.qualifiers:
            if not any(pair_qu == qu for _, pair_qu in doc.indexed_terms):
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

    def _exact_matches(self, doc: Document, query: Query) -> int:
        doc_keywords = {kw for kw, _ in doc.indexed_terms}
        return sum(1 for kw in query.keywords if kw in doc_keywords)


EMPTY = "empty"
ACCEPTABLE = "acceptable"
TOO_MANY = "too-many"

DEFAULT_TOO_MANY = 10


def evaluate_results(count: int, too_many_threshold: int = DEFAULT_TOO_MANY) -> str:
    """Step verdict on a result count: empty / acceptable / too-many."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return EMPTY
    if count > too_many_threshold:
        return TOO_MANY
    return ACCEPTABLE


# ---------------------------------------------------------------------------
# Loaders (record syntax shared with the predicate registry file)


def _parse_fields(tokens: list, lineno: int, source: str) -> dict:
    fields = {}
    for tok in tokens:
        if "=" not in tok:
            raise TerminologyError(f"{source} line {lineno}: expected key=value, got {tok!r}")
        key, value = tok.split("=", 1)
        fields[key] = value
    return fields


def _split_list(value: str) -> tuple:
    return tuple(v for v in value.split(",") if v)


def load_terminology(source: str) -> Terminology:
    """Parse ``term`` records::

        term paludisme.mc kind=keyword label="paludisme" syn="malaria" \
             narrower=paludisme-falciparum.mc qualifiers=therapeutique.qu
    """
    import shlex

    entries = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = shlex.split(line)
        if tokens[0] != "term":
            raise TerminologyError(f"terminology line {lineno}: expected 'term', got {tokens[0]!r}")
        eid = tokens[1]
        fields = _parse_fields(tokens[2:], lineno, "terminology")
        entries.append(
            TerminologyEntry(
                id=eid,
                label=fields.get("label", eid),
                kind=fields.get("kind", KEYWORD),
                synonyms=_split_list(fields.get("syn", "")),
                broader=_split_list(fields.get("broader", "")),
                narrower=_split_list(fields.get("narrower", "")),
                associated_qualifiers=_split_list(fields.get("qualifiers", "")),
            )
        )
    return Terminology(entries)


def load_documents(source: str, terminology: Terminology) -> DocumentStore:
    """Parse ``doc`` records::

        doc d001 title="..." desc="..." type=patient.tr audience=patient \
            metaterms=infectiologie.mt index="paludisme.mc:therapeutique.qu;therapeutique.mc"
    """
    import shlex

    documents = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = shlex.split(line)
        if tokens[0] != "doc":
            raise TerminologyError(f"corpus line {lineno}: expected 'doc', got {tokens[0]!r}")
        doc_id = tokens[1]
        fields = _parse_fields(tokens[2:], lineno, "corpus")
        indexed = []
        for pair in fields.get("index", "").split(";"):
            pair = pair.strip()
            if not pair:
                continue
            if ":" in pair:
                kw, qu = pair.split(":", 1)
                indexed.append((kw, qu))
            else:
                indexed.append((pair, None))
        documents.append(
            Document(
                id=doc_id,
                title=fields.get("title", doc_id),
                description=fields.get("desc", ""),
                indexed_terms=tuple(indexed),
                metaterms=_split_list(fields.get("metaterms", "")),
                resource_type=fields.get("type") or None,
                audience=fields.get("audience") or None,
            )
        )
    return DocumentStore(documents, terminology)
