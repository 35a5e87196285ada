"""Content algebra and information state.

Questions, propositions, actions and dialogue moves form the content layer
shared by the whole engine.  The information state is the conversational
scoreboard, split into a private part (agenda, plan stack, beliefs) and a
shared part (commitments, QUD, issues, actions, utterance record).

Every value here is immutable: update operations return new states, so a
state can be snapshotted, replayed or handed to another execution context
without defensive copies.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Optional, Union

POSITIVE = "positive"
NEGATIVE = "negative"

POLAR = "polar"
WH = "wh"
ALT = "alt"

USER = "user"
SYSTEM = "system"

ACTS = frozenset(
    {
        "ask",
        "answer",
        "shortAnswer",
        "inform",
        "suggest",
        "informIntent",
        "requestInfo",
        "greet",
        "quit",
        "icm",
    }
)
ICM_LEVELS = frozenset({"perception", "semantic", "understanding", "acceptance"})
ICM_POLARITIES = frozenset({"positive", "negative", "check"})
ICM_ABBREV = {
    "perception": "per",
    "semantic": "sem",
    "understanding": "und",
    "acceptance": "acc",
}

# Guard against accommodation loops blowing up the QUD.
QUD_MAX_DEPTH = 32

# Sorts that accept any term at all, or any terminology term.
ANY_SORT = "texte"
TERM_SORT = "terme"


class EngineError(Exception):
    """Internal engine invariant broken (e.g. QUD depth cap exceeded)."""


class RegistryError(Exception):
    """A predicate is missing from the registry or used at the wrong arity."""


class AccommodationRequired(Exception):
    """Raised by downdate when the question is not on the QUD.

    This is a signal to the update engine, not a failure: the engine reacts
    by trying question accommodation.
    """

    def __init__(self, question: Question, answer: Proposition):
        super().__init__(f"question {question} not under discussion")
        self.question = question
        self.answer = answer


@dataclass(frozen=True)
class Proposition:
    """Ground task predicate instance, positive or negative."""

    predicate: str
    args: tuple = ()
    polarity: str = POSITIVE

    def negated(self) -> Proposition:
        pol = NEGATIVE if self.polarity == POSITIVE else POSITIVE
        return replace(self, polarity=pol)

    def __str__(self) -> str:
        body = f"{self.predicate}({', '.join(str(a) for a in self.args)})"
        return body if self.polarity == POSITIVE else f"not {body}"


@dataclass(frozen=True)
class Question:
    """Polar, wh (lambda-abstracted) or alternative question.

    For wh questions ``wh_index`` locates the abstracted variable inside the
    predicate's argument positions; ``bound_args`` fills the remaining
    positions in order.
    """

    kind: str
    predicate: str
    bound_args: tuple = ()
    abstracted_sort: Optional[str] = None
    wh_index: int = 0
    alternatives: tuple = ()
    multi_answer: bool = False

    def __post_init__(self):
        if self.kind not in (POLAR, WH, ALT):
            raise ValueError(f"unknown question kind {self.kind!r}")
        if self.kind == WH and self.abstracted_sort is None:
            raise ValueError("wh question requires an abstracted sort")
        if self.kind != WH and self.abstracted_sort is not None:
            raise ValueError(f"{self.kind} question cannot abstract a variable")
        if self.kind == ALT and len(self.alternatives) < 2:
            raise ValueError("alt question requires at least two alternatives")
        if self.multi_answer and self.kind != WH:
            raise ValueError("multi-answer applies to wh questions only")

    def __str__(self) -> str:
        if self.kind == POLAR:
            inner = ", ".join(str(a) for a in self.bound_args)
            return f"?{self.predicate}({inner})" if inner else f"?{self.predicate}"
        if self.kind == ALT:
            alts = " | ".join(str(a) for a in self.alternatives)
            return f"?alt{{{alts}}}"
        slots = list(str(a) for a in self.bound_args)
        slots.insert(self.wh_index, "x")
        return f"?x.{self.predicate}({', '.join(slots)})"


@dataclass(frozen=True)
class Action:
    """Named sub-dialogue or task action."""

    name: str
    args: tuple = ()

    def __str__(self) -> str:
        inner = ", ".join(str(a) for a in self.args)
        return f"{self.name}({inner})" if inner else self.name


Content = Union[Question, Proposition, Action]


@dataclass(frozen=True)
class DialogueMove:
    """Typed communicative act with propositional content.

    ``flags`` carries marker-derived hints from the interpreter (correction,
    abandon, cooperative) that update rules may consult.
    """

    speaker: str
    act: str
    content: Optional[Content] = None
    icm_level: Optional[str] = None
    icm_polarity: Optional[str] = None
    flags: frozenset = frozenset()

    def __post_init__(self):
        if self.act not in ACTS:
            raise ValueError(f"unknown act {self.act!r}")
        if self.act == "icm":
            if self.icm_level not in ICM_LEVELS or self.icm_polarity not in ICM_POLARITIES:
                raise ValueError("icm move requires icm_level and icm_polarity")
        elif self.icm_level is not None or self.icm_polarity is not None:
            raise ValueError("icm_level/icm_polarity are reserved for icm moves")
        if self.act in ("answer", "shortAnswer") and not isinstance(self.content, Proposition):
            raise ValueError(f"{self.act} content must be a Proposition")
        if self.act in ("ask", "requestInfo") and not isinstance(self.content, Question):
            raise ValueError(f"{self.act} content must be a Question")
        if self.act == "informIntent" and not isinstance(self.content, Action):
            raise ValueError("informIntent content must be an Action")

    @property
    def icm_tag(self) -> Optional[str]:
        if self.act != "icm":
            return None
        pol = {"positive": "pos", "negative": "neg", "check": "chk"}[self.icm_polarity]
        return f"icm:{ICM_ABBREV[self.icm_level]}*{pol}"

    def __str__(self) -> str:
        head = self.icm_tag or self.act
        return f"{head}({self.content})" if self.content is not None else head


# ---------------------------------------------------------------------------
# Predicate registry


@dataclass(frozen=True)
class PredicateSpec:
    """Declared task predicate: argument names and sorts plus question wiring.

    ``wh_companion`` names the open question implicitly raised under a polar
    question over this predicate; ``assoc_action`` names the action pushed
    when the polar question is resolved positively.
    """

    name: str
    args: tuple = ()  # ((arg name, sort), ...)
    multi_answer: bool = False
    wh_companion: Optional[str] = None
    assoc_action: Optional[str] = None
    label: Optional[str] = None

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def sorts(self) -> tuple:
        return tuple(sort for _, sort in self.args)

    @property
    def arg_names(self) -> tuple:
        return tuple(name for name, _ in self.args)


class PredicateRegistry:
    """Lookup table for predicate declarations and sort value sets."""

    def __init__(self, specs: Iterable[PredicateSpec], sort_values: Optional[Mapping[str, tuple]] = None):
        self._specs = {s.name: s for s in specs}
        self.sort_values = dict(sort_values or {})

    def __contains__(self, name: str) -> bool:
        return name in self._specs

    def __iter__(self):
        return iter(self._specs.values())

    def __len__(self) -> int:
        return len(self._specs)

    def spec(self, name: str) -> PredicateSpec:
        try:
            return self._specs[name]
        except KeyError:
            raise RegistryError(f"unknown predicate {name!r}") from None

    def check(self, prop: Proposition) -> None:
        spec = self.spec(prop.predicate)
        if len(prop.args) != spec.arity:
            raise RegistryError(
                f"{prop.predicate} expects {spec.arity} argument(s), got {len(prop.args)}"
            )

    def wh_question(self, name: str, bound_args: tuple = (), wh_index: int = 0) -> Question:
        spec = self.spec(name)
        if not spec.args:
            raise RegistryError(f"{name} has no argument to abstract over")
        return Question(
            kind=WH,
            predicate=name,
            bound_args=bound_args,
            abstracted_sort=spec.sorts[wh_index],
            wh_index=wh_index,
            multi_answer=spec.multi_answer,
        )

    def polar_question(self, name: str, args: tuple = ()) -> Question:
        self.spec(name)
        return Question(kind=POLAR, predicate=name, bound_args=args)

    def alt_question(self, name: str) -> Question:
        """Alternative question ranging over the values of the predicate's sort."""
        spec = self.spec(name)
        if spec.arity != 1:
            raise RegistryError(f"alt question needs a unary predicate, {name} has arity {spec.arity}")
        values = self.sort_values.get(spec.sorts[0])
        if not values:
            raise RegistryError(f"sort {spec.sorts[0]!r} declares no value set")
        alts = tuple(Proposition(name, (v,)) for v in values)
        return Question(kind=ALT, predicate=name, alternatives=alts)


_NUMBER_RE = re.compile(r"^-?\d+$")


def default_term_sorts(term) -> frozenset:
    """Sorts a ground term can fill, judged by shape alone.

    Terminology-aware resolvers wrap this one and add the sorts derived from
    entry kinds; see ``taskmodel.Terminology.term_sorts``.
    """
    term = str(term)
    sorts = {ANY_SORT}
    if _NUMBER_RE.match(term):
        sorts.add("nombre")
    for suffix, sort in ((".mc", "motcle"), (".qu", "qualificatif"), (".mt", "metaterme"), (".tr", "typeressource")):
        if term.endswith(suffix):
            sorts.add(sort)
            sorts.add(TERM_SORT)
    return frozenset(sorts)


SortResolver = Callable[[object], frozenset]


def resolves(
    answer: Proposition,
    question: Question,
    registry: PredicateRegistry,
    term_sorts: SortResolver = default_term_sorts,
) -> bool:
    """True iff ``answer`` settles ``question`` under the question semantics.

    Polar questions accept their own predicate instance or its negation; wh
    questions accept a matching predicate whose filler term carries the
    abstracted sort; alt questions accept exactly one of their alternatives.
    Pure and deterministic.
    """
    registry.check(answer)
    if question.kind == POLAR:
        return answer.predicate == question.predicate and answer.args == question.bound_args
    if question.kind == ALT:
        return any(answer == alt for alt in question.alternatives)
    # wh
    if answer.predicate != question.predicate:
        return False
    rest = answer.args[: question.wh_index] + answer.args[question.wh_index + 1 :]
    if rest != question.bound_args:
        return False
    filler = answer.args[question.wh_index]
    sort = question.abstracted_sort
    if sort == ANY_SORT:
        return True
    sorts = term_sorts(filler)
    if sort == TERM_SORT:
        return TERM_SORT in sorts
    return sort in sorts


# ---------------------------------------------------------------------------
# Information state


@dataclass(frozen=True)
class PlanFrame:
    """One open sub-dialogue on the plan stack.

    ``completed`` holds ids of items already executed (do/raise/enter),
    ``asked`` ids of items whose question has been voiced.  ``embedded``
    marks an incident sub-dialogue entered through the digression store.
    """

    plan_name: str
    completed: frozenset = frozenset()
    asked: frozenset = frozenset()
    embedded: bool = False

    def complete(self, item_id: str) -> PlanFrame:
        return replace(self, completed=self.completed | {item_id})

    def mark_asked(self, item_id: str) -> PlanFrame:
        return replace(self, asked=self.asked | {item_id})


@dataclass(frozen=True)
class DigressionSnapshot:
    plan: tuple = ()
    agenda: tuple = ()


@dataclass(frozen=True)
class Private:
    agenda: tuple = ()  # queue of Actions, next first
    plan: tuple = ()  # stack of PlanFrames, top last
    beliefs: tuple = ()
    pending_moves: tuple = ()


@dataclass(frozen=True)
class Shared:
    commitments: tuple = ()  # ordered set of Propositions, newest last
    qud: tuple = ()  # stack of Questions, top last
    issues: tuple = ()
    actions: tuple = ()  # stack of Actions, top last
    previous_moves: tuple = ()
    last_speaker: Optional[str] = None
    last_moves: tuple = ()


@dataclass(frozen=True)
class InformationState:
    private: Private = field(default_factory=Private)
    shared: Shared = field(default_factory=Shared)
    digressions: tuple = ()  # stack of DigressionSnapshots, innermost last

    # Convenience accessors -------------------------------------------------

    @property
    def qud_top(self) -> Optional[Question]:
        return self.shared.qud[-1] if self.shared.qud else None

    @property
    def active_frame(self) -> Optional[PlanFrame]:
        return self.private.plan[-1] if self.private.plan else None

    def committed(self, predicate: str) -> tuple:
        return tuple(p for p in self.shared.commitments if p.predicate == predicate)

    def has_commitment(self, prop: Proposition) -> bool:
        return prop in self.shared.commitments


def _replace_shared(state: InformationState, **kw) -> InformationState:
    return replace(state, shared=replace(state.shared, **kw))


def _replace_private(state: InformationState, **kw) -> InformationState:
    return replace(state, private=replace(state.private, **kw))


def raise_question(state: InformationState, q: Question) -> InformationState:
    """Push ``q`` on QUD and issues; re-raising the topmost question is a no-op."""
    if state.qud_top == q:
        return state
    qud = tuple(x for x in state.shared.qud if x != q) + (q,)
    if len(qud) > QUD_MAX_DEPTH:
        raise EngineError(f"QUD depth cap ({QUD_MAX_DEPTH}) exceeded raising {q}")
    issues = state.shared.issues
    if q not in issues:
        issues = issues + (q,)
    return _replace_shared(state, qud=qud, issues=issues)


def drop_question(state: InformationState, q: Question, from_issues: bool = True) -> InformationState:
    qud = tuple(x for x in state.shared.qud if x != q)
    issues = state.shared.issues
    if from_issues:
        issues = tuple(x for x in issues if x != q)
    return _replace_shared(state, qud=qud, issues=issues)


def commit(state: InformationState, prop: Proposition, single_answer: bool = False) -> InformationState:
    """Add a commitment with latest-wins correction semantics.

    The contradiction (same predicate and args, opposite polarity) is always
    removed.  When ``single_answer`` is set, any earlier commitment on the
    same predicate is replaced, keeping at most one per question predicate.
    """
    kept = []
    for p in state.shared.commitments:
        if p.predicate == prop.predicate and (single_answer or p.args == prop.args):
            continue
        kept.append(p)
    kept.append(prop)
    return _replace_shared(state, commitments=tuple(kept))


def retract(state: InformationState, predicate: str, args: Optional[tuple] = None) -> InformationState:
    kept = tuple(
        p
        for p in state.shared.commitments
        if not (p.predicate == predicate and (args is None or p.args == args))
    )
    return _replace_shared(state, commitments=kept)


def downdate(
    state: InformationState,
    q: Question,
    answer: Proposition,
    registry: PredicateRegistry,
    term_sorts: SortResolver = default_term_sorts,
) -> InformationState:
    """Integrate a resolving answer for ``q``.

    The answer joins the shared commitments.  Single-answer questions leave
    the QUD and the issues stack; multi-answer questions stay open until the
    owning sub-dialogue closes them, and a later answer simply accumulates.
    A question absent from the QUD signals that accommodation is required.
    """
    if not resolves(answer, q, registry, term_sorts):
        raise ValueError(f"{answer} does not resolve {q}")
    if q not in state.shared.qud:
        raise AccommodationRequired(q, answer)
    state = commit(state, answer, single_answer=not q.multi_answer)
    if not q.multi_answer:
        state = drop_question(state, q)
    return state


def push_frame(state: InformationState, frame: PlanFrame) -> InformationState:
    return _replace_private(state, plan=state.private.plan + (frame,))


def pop_frame(state: InformationState) -> InformationState:
    return _replace_private(state, plan=state.private.plan[:-1])


def update_top_frame(state: InformationState, frame: PlanFrame) -> InformationState:
    return _replace_private(state, plan=state.private.plan[:-1] + (frame,))


def push_action(state: InformationState, action: Action) -> InformationState:
    return _replace_shared(state, actions=state.shared.actions + (action,))


def pop_action(state: InformationState, action: Action) -> InformationState:
    acts = tuple(a for a in state.shared.actions if a != action)
    return _replace_shared(state, actions=acts)


def enqueue_agenda(state: InformationState, *actions: Action) -> InformationState:
    return _replace_private(state, agenda=state.private.agenda + tuple(actions))


def record_utterance(state: InformationState, speaker: str, moves: tuple) -> InformationState:
    return _replace_shared(
        state,
        previous_moves=state.shared.previous_moves + tuple(moves),
        last_speaker=speaker,
        last_moves=tuple(moves),
    )


def snapshot_digression(state: InformationState) -> InformationState:
    snap = DigressionSnapshot(plan=state.private.plan, agenda=state.private.agenda)
    return replace(state, digressions=state.digressions + (snap,))


def restore_digression(state: InformationState) -> InformationState:
    """Resume the governing dialogue exactly where it was left.

    The plan stack comes back from the snapshot; the agenda keeps moves
    queued meanwhile (the snapshot copy is for inspection only), so closing
    a digression never re-emits already-delivered moves.
    """
    if not state.digressions:
        raise EngineError("no digression snapshot to restore")
    snap = state.digressions[-1]
    state = replace(state, digressions=state.digressions[:-1])
    return _replace_private(state, plan=snap.plan)
