"""Declarative sub-dialogue plan library.

Plans encode the sub-dialogue graph: each plan realizes one named action
and lists the findout/raise/do/if-then/enter items the engine walks.  A
relation table records dominance, hard satisfaction-precedence and soft
sequence preferences between segments.

The plan definition format is line oriented so the library can be extended
without touching code::

    plan QueryConstruction action=ConstructionRequete epistemic announce locals=AjoutAutreChose
      do init InitialisationRequete
      findout kw ?x.AjoutMotCle(x)
      ifthen cond VerdictRequete -> do retry RelanceRequete
      enter test QueryTest
    relation precedence ConstructionRequete LancementRequete
    relation dominance ConstructionRequete ?x.AjoutMotCle(x)
    relation sequence Opening Choice

Blank lines and ``#`` comments are ignored.  Indentation is decorative;
item lines belong to the most recent ``plan`` header.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    Action,
    InformationState,
    PlanFrame,
    Question,
    PredicateRegistry,
    resolves,
    default_term_sorts,
)


class PlanLoadError(Exception):
    """Malformed plan source, dangling reference or precedence cycle."""


FINDOUT = "findout"
RAISE = "raise"
DO = "do"
IF_THEN = "if-then"
ENTER = "enter-subdialogue"

DONE = "done"  # sentinel returned by next_item when a plan is exhausted


@dataclass(frozen=True)
class PlanItem:
    kind: str
    id: str
    question: Optional[Question] = None
    action: Optional[Action] = None
    condition: Optional[str] = None  # predicate name for if-then guards
    body: tuple = ()  # nested items for if-then
    subdialogue: Optional[str] = None

    def __post_init__(self):
        if self.kind == IF_THEN and not self.body:
            raise PlanLoadError(f"if-then item {self.id!r} has an empty body")


@dataclass(frozen=True)
class Plan:
    name: str
    action: Action
    items: tuple = ()
    epistemic: bool = False
    announce: bool = False
    close_inform: Optional[str] = None
    # Question predicates local to this sub-dialogue; cleared when the plan
    # is relaunched so its questions can be asked afresh.
    locals: tuple = ()

    def __post_init__(self):
        seen = set()
        for item in _walk(self.items):
            if item.id in seen:
                raise PlanLoadError(f"duplicate item id {item.id!r} in plan {self.name}")
            seen.add(item.id)

    def item(self, item_id: str) -> PlanItem:
        for it in _walk(self.items):
            if it.id == item_id:
                return it
        raise KeyError(item_id)


def _walk(items: Iterable[PlanItem]):
    for it in items:
        yield it
        if it.kind == IF_THEN:
            yield from _walk(it.body)


@dataclass(frozen=True)
class RelationTable:
    dominance: tuple = ()  # (action name, action name or question str)
    precedence: tuple = ()  # (before, after) action names, hard
    sequence: tuple = ()  # (first, next) action names, soft preference

    def predecessors(self, action_name: str) -> frozenset:
        """All actions that must be done before ``action_name`` (transitive)."""
        direct = {}
        for before, after in self.precedence:
            direct.setdefault(after, set()).add(before)
        result: set = set()
        stack = list(direct.get(action_name, ()))
        while stack:
            a = stack.pop()
            if a in result:
                continue
            result.add(a)
            stack.extend(direct.get(a, ()))
        return frozenset(result)

    def next_in_sequence(self, action_name: str) -> Optional[str]:
        for first, nxt in self.sequence:
            if first == action_name:
                return nxt
        return None


@dataclass(frozen=True)
class PlanLibrary:
    plans: dict
    relations: RelationTable

    def __contains__(self, name: str) -> bool:
        return name in self.plans

    def plan(self, name: str) -> Plan:
        try:
            return self.plans[name]
        except KeyError:
            raise PlanLoadError(f"no plan named {name!r}") from None

    def plan_for_action(self, action_name: str) -> Optional[Plan]:
        for p in self.plans.values():
            if p.action.name == action_name:
                return p
        return None


# ---------------------------------------------------------------------------
# Parsing


def _parse_question(token: str, registry: PredicateRegistry) -> Question:
    if token.startswith("?alt."):
        return registry.alt_question(token[len("?alt.") :])
    if token.startswith("?x."):
        name = token[len("?x.") :].split("(", 1)[0]
        return registry.wh_question(name)
    if token.startswith("?"):
        return registry.polar_question(token[1:])
    raise PlanLoadError(f"cannot parse question term {token!r}")


def _parse_item(tokens: list, registry: PredicateRegistry) -> PlanItem:
    kind, item_id, rest = tokens[0], tokens[1], tokens[2:]
    if kind == "findout" or kind == "raise":
        if len(rest) != 1:
            raise PlanLoadError(f"{kind} {item_id!r} takes exactly one question term")
        q = _parse_question(rest[0], registry)
        return PlanItem(kind=FINDOUT if kind == "findout" else RAISE, id=item_id, question=q)
    if kind == "do":
        if len(rest) != 1:
            raise PlanLoadError(f"do {item_id!r} takes exactly one action name")
        return PlanItem(kind=DO, id=item_id, action=Action(rest[0]))
    if kind == "enter":
        if len(rest) != 1:
            raise PlanLoadError(f"enter {item_id!r} takes exactly one plan name")
        return PlanItem(kind=ENTER, id=item_id, subdialogue=rest[0])
    if kind == "ifthen":
        if "->" not in rest:
            raise PlanLoadError(f"ifthen {item_id!r} needs a '->' body")
        arrow = rest.index("->")
        cond = rest[:arrow]
        if len(cond) != 1:
            raise PlanLoadError(f"ifthen {item_id!r} takes one condition predicate")
        registry.spec(cond[0])
        body_tokens = rest[arrow + 1 :]
        body_items = []
        for part in _split_on(body_tokens, ";"):
            if part:
                body_items.append(_parse_item(part, registry))
        return PlanItem(kind=IF_THEN, id=item_id, condition=cond[0], body=tuple(body_items))
    raise PlanLoadError(f"unknown plan item kind {kind!r}")


def _split_on(tokens: list, sep: str):
    part: list = []
    for tok in tokens:
        if tok == sep:
            yield part
            part = []
        else:
            part.append(tok)
    yield part


def load_plans(source: str, registry: PredicateRegistry) -> PlanLibrary:
    """Parse a plan definition document and validate the whole library.

    Validation covers: unique plan per action, referenced sub-dialogues and
    relation members declared, and acyclic satisfaction-precedence (a cycle
    aborts the load, naming its path).
    """
    plans: dict = {}
    dominance: list = []
    precedence: list = []
    sequence: list = []
    current: Optional[dict] = None

    def close_current():
        nonlocal current
        if current is None:
            return
        plan = Plan(
            name=current["name"],
            action=Action(current["action"]),
            items=tuple(current["items"]),
            epistemic=current["epistemic"],
            announce=current["announce"],
            close_inform=current["close_inform"],
            locals=tuple(current["locals"]),
        )
        if plan.name in plans:
            raise PlanLoadError(f"plan {plan.name!r} defined twice")
        plans[plan.name] = plan
        current = None

    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            tokens = shlex.split(line)
        except ValueError as exc:
            raise PlanLoadError(f"line {lineno}: {exc}") from None
        head = tokens[0]
        if head == "plan":
            close_current()
            opts = {"epistemic": False, "announce": False, "close_inform": None, "locals": []}
            name = tokens[1]
            action = None
            for tok in tokens[2:]:
                if tok == "epistemic":
                    opts["epistemic"] = True
                elif tok == "announce":
                    opts["announce"] = True
                elif tok.startswith("action="):
                    action = tok.split("=", 1)[1]
                elif tok.startswith("close-inform="):
                    opts["close_inform"] = tok.split("=", 1)[1]
                elif tok.startswith("locals="):
                    opts["locals"] = [p for p in tok.split("=", 1)[1].split(",") if p]
                else:
                    raise PlanLoadError(f"line {lineno}: unknown plan option {tok!r}")
            if action is None:
                raise PlanLoadError(f"line {lineno}: plan {name!r} lacks action=")
            current = {"name": name, "action": action, "items": [], **opts}
        elif head == "relation":
            close_current()
            if len(tokens) != 4:
                raise PlanLoadError(f"line {lineno}: relation takes kind and two members")
            kind, a, b = tokens[1], tokens[2], tokens[3]
            if kind == "dominance":
                dominance.append((a, b))
            elif kind == "precedence":
                precedence.append((a, b))
            elif kind == "sequence":
                sequence.append((a, b))
            else:
                raise PlanLoadError(f"line {lineno}: unknown relation kind {kind!r}")
        else:
            if current is None:
                raise PlanLoadError(f"line {lineno}: item outside any plan")
            try:
                current["items"].append(_parse_item(tokens, registry))
            except PlanLoadError as exc:
                raise PlanLoadError(f"line {lineno}: {exc}") from None
    close_current()

    table = RelationTable(
        dominance=tuple(dominance), precedence=tuple(precedence), sequence=tuple(sequence)
    )
    library = PlanLibrary(plans=plans, relations=table)
    _validate(library)
    return library


def _validate(library: PlanLibrary) -> None:
    actions = {p.action.name for p in library.plans.values()}
    if len(actions) != len(library.plans):
        raise PlanLoadError("two plans share one action")
    for plan in library.plans.values():
        for item in _walk(plan.items):
            if item.kind == ENTER and item.subdialogue not in library.plans:
                raise PlanLoadError(
                    f"plan {plan.name}: unknown sub-dialogue {item.subdialogue!r}"
                )
    table = library.relations
    for kind, pairs in (("precedence", table.precedence), ("sequence", table.sequence)):
        for a, b in pairs:
            for member in (a, b):
                if member not in actions:
                    raise PlanLoadError(f"{kind} relation references unknown action {member!r}")
    for a, _b in table.dominance:
        if a not in actions:
            raise PlanLoadError(f"dominance relation references unknown action {a!r}")
    cycle = _find_cycle(table.precedence)
    if cycle:
        raise PlanLoadError("satisfaction-precedence cycle: " + " -> ".join(cycle))


def _find_cycle(pairs: tuple) -> Optional[list]:
    adjacency: dict = {}
    for before, after in pairs:
        adjacency.setdefault(before, []).append(after)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in adjacency}
    path: list = []

    def visit(node) -> Optional[list]:
        color[node] = GREY
        path.append(node)
        for nxt in adjacency.get(node, ()):
            if color.get(nxt, WHITE) == GREY:
                return path[path.index(nxt) :] + [nxt]
            if color.get(nxt, WHITE) == WHITE:
                found = visit(nxt)
                if found:
                    return found
        path.pop()
        color[node] = BLACK
        return None

    for node in list(adjacency):
        if color[node] == WHITE:
            found = visit(node)
            if found:
                return found
    return None


# ---------------------------------------------------------------------------
# Services for the update engine


def precedence_satisfied(table: RelationTable, target: Action, done: frozenset) -> bool:
    """True iff every action that must precede ``target`` is in ``done``.

    ``done`` holds action names; the check is transitive over the
    satisfaction-precedence relation and monotone in ``done``.
    """
    return table.predecessors(target.name) <= frozenset(done)


def question_resolved(state: InformationState, q: Question, registry: PredicateRegistry,
                      term_sorts=default_term_sorts) -> bool:
    commitments = state.shared.commitments
    return any(resolves(p, q, registry, term_sorts) for p in commitments)


def next_item(
    plan: Plan,
    state: InformationState,
    frame: Optional[PlanFrame] = None,
    registry: Optional[PredicateRegistry] = None,
    term_sorts=default_term_sorts,
):
    """First plan item still owed given the shared commitments, or DONE.

    Findout items are owed while no commitment resolves their question, so
    items answered out of order are skipped: this is what lets global
    accommodation leave no question to re-ask.  Do/raise/enter items are owed
    until the frame marks them completed.
    """
    if frame is None:
        frame = PlanFrame(plan_name=plan.name)
    todo = list(plan.items)
    while todo:
        item = todo.pop(0)
        if item.id in frame.completed:
            continue
        if item.kind == IF_THEN:
            if state.committed(item.condition):
                todo = list(item.body) + todo
            continue
        if item.kind == FINDOUT:
            if registry is not None and question_resolved(state, item.question, registry, term_sorts):
                continue
            return item
        return item
    return DONE
