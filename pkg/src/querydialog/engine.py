"""Update engine: the control cycle over the information state.

One engine instance drives one session.  Each user turn runs
integrate-all-then-select: pending moves are integrated by the first update
rule whose guard accepts them (priority order: grounding > accommodation >
integration > selection), then the selection pass emits the system's moves:
owed grounding ICMs first, then refinement proposals, then the active
plan's next surface moves.

The engine never mutates a state in place; every step returns a new
``EngineState``.  A trace record is appended per fired rule so a session
can be replayed and diffed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from . import plans as planlib
from . import taskmodel
from .core import (
    ALT,
    NEGATIVE,
    POLAR,
    POSITIVE,
    SYSTEM,
    USER,
    WH,
    Action,
    DialogueMove,
    EngineError,
    InformationState,
    PlanFrame,
    PredicateRegistry,
    Proposition,
    Question,
    commit,
    downdate,
    drop_question,
    pop_frame,
    push_frame,
    raise_question,
    record_utterance,
    restore_digression,
    retract,
    snapshot_digression,
    update_top_frame,
)
from .plans import DONE, ENTER, FINDOUT, IF_THEN, RAISE, DO, PlanLibrary
from .taskmodel import (
    DocumentStore,
    LaunchError,
    Query,
    RoleError,
    Terminology,
    add_term,
    evaluate_results,
    remove_term,
)

MAX_DIGRESSION_DEPTH = 4

NO_MATCH = "no-match"

# Query-building predicates; commitments on these survive sub-dialogue
# closes so the query accumulates across search sequences.
QUERY_PREDICATES = {
    "AjoutMotCle": taskmodel.KEYWORD,
    "AjoutQualificatif": taskmodel.QUALIFIER,
    "AjoutMetaterme": taskmodel.METATERM,
    "AjoutTypeRessource": taskmodel.RESOURCE_TYPE,
}

# Predicates echoed back at understanding level before acceptance.
ECHO_PREDICATES = {"RequeteInitiale"}


class AmbiguousAccommodation(Exception):
    def __init__(self, candidates):
        super().__init__(f"{len(candidates)} candidate questions")
        self.candidates = tuple(candidates)


TASK_DRIVEN = "task-driven"
COOPERATIVE = "cooperative"
CONSTRUCTIVE = "constructive"


@dataclass(frozen=True)
class StrategyMode:
    """Dialogue strategy currently in force.

    Cooperative: the goal stands but the plan is being adapted (pending
    refinement proposals).  Constructive: the goal is parked for a
    digression, so a digression-store snapshot always exists.
    """

    mode: str

    def __post_init__(self):
        if self.mode not in (TASK_DRIVEN, COOPERATIVE, CONSTRUCTIVE):
            raise ValueError(f"unknown strategy mode {self.mode!r}")


@dataclass(frozen=True)
class EngineState:
    """Full per-session state: information state plus task-side values."""

    info: InformationState = field(default_factory=InformationState)
    query: Query = field(default_factory=Query)
    results: Optional[tuple] = None  # ordered document ids of the last launch
    proposals: tuple = ()  # pending refinement steps: ("suggest", prop) | ("ask", q)
    last_terms: tuple = ()  # recently mentioned terminology ids, newest last
    closed: bool = False

    def with_info(self, info: InformationState) -> "EngineState":
        return replace(self, info=info)


@dataclass(frozen=True)
class UpdateRule:
    name: str
    priority: int
    guard: Callable
    effect: Callable


def system_asked(info: InformationState, q: Question, extra=()) -> bool:
    """Did the system voice this question (as an ask or a suggestion)?"""
    for move in tuple(info.shared.previous_moves) + tuple(extra):
        if move.speaker != SYSTEM:
            continue
        if move.act == "ask" and move.content == q:
            return True
        if (
            move.act == "suggest"
            and isinstance(move.content, Proposition)
            and move.content.predicate == q.predicate
            and move.content.args == q.bound_args
        ):
            return True
    return False


class Engine:
    """Rule-driven dialogue manager for one session."""

    def __init__(
        self,
        registry: PredicateRegistry,
        library: PlanLibrary,
        terminology: Terminology,
        store: DocumentStore,
        definitions: Optional[dict] = None,
        too_many_threshold: int = taskmodel.DEFAULT_TOO_MANY,
        trace_hook: Optional[Callable] = None,
    ):
        self.registry = registry
        self.library = library
        self.terminology = terminology
        self.store = store
        self.definitions = dict(definitions or {})
        self.too_many_threshold = too_many_threshold
        self.trace: list = []
        self.trace_hook = trace_hook
        self._rules = self._build_rules()
        self._executors = {
            "Salutation": self._exec_salutation,
            "InitialisationRequete": self._exec_init_query,
            "RecapitulationRequete": self._exec_recap,
            "ExecutionRequete": self._exec_launch,
            "EvaluationQuantitative": self._exec_evaluate,
            "DescriptionListe": self._exec_list_description,
            "PresentationDocument": self._exec_present_document,
            "RepondreDefinition": self._exec_answer_definition,
            "ExpliquerSysteme": self._exec_explain_system,
            "Adieux": self._exec_farewell,
        }

    # ------------------------------------------------------------------
    # small helpers

    def term_sorts(self, term):
        return self.terminology.term_sorts(term)

    def _resolves(self, answer: Proposition, q: Question) -> bool:
        from .core import resolves

        return resolves(answer, q, self.registry, self.term_sorts)

    def _question_resolved(self, info: InformationState, q: Question) -> bool:
        return planlib.question_resolved(info, q, self.registry, self.term_sorts)

    def _say(self, state: EngineState, *moves: DialogueMove) -> EngineState:
        agenda = state.info.private.agenda + tuple(Action("say", (m,)) for m in moves)
        info = replace(state.info, private=replace(state.info.private, agenda=agenda))
        return state.with_info(info)

    def _icm(self, level: str, polarity: str, content=None) -> DialogueMove:
        return DialogueMove(SYSTEM, "icm", content, icm_level=level, icm_polarity=polarity)

    def _note_terms(self, state: EngineState, prop: Proposition) -> EngineState:
        terms = [a for a in prop.args if isinstance(a, str) and a in self.terminology]
        if not terms:
            return state
        last = tuple(t for t in state.last_terms if t not in terms) + tuple(terms)
        return replace(state, last_terms=last[-8:])

    def _blocked(self, info: InformationState, extra=()) -> bool:
        """An unanswered system question tops the QUD: wait for the user."""
        top = info.qud_top
        if top is None:
            return False
        return system_asked(info, top, extra) and not self._question_resolved(info, top)

    def _plan_question_predicates(self, plan: planlib.Plan) -> set:
        preds = set(plan.locals)
        for item in plan.items:
            stack = [item]
            while stack:
                it = stack.pop()
                if it.kind == IF_THEN:
                    stack.extend(it.body)
                if it.question is not None:
                    preds.add(it.question.predicate)
                    spec = self.registry.spec(it.question.predicate)
                    if spec.wh_companion:
                        preds.add(spec.wh_companion)
        return preds

    def _drop_plan_questions(self, info: InformationState, plan: planlib.Plan) -> InformationState:
        preds = self._plan_question_predicates(plan)
        qud = tuple(q for q in info.shared.qud if q.predicate not in preds)
        issues = tuple(q for q in info.shared.issues if q.predicate not in preds)
        return replace(info, shared=replace(info.shared, qud=qud, issues=issues))

    def _clear_locals(self, info: InformationState, plan: planlib.Plan) -> InformationState:
        for pred in plan.locals:
            info = retract(info, pred)
        return info

    # ------------------------------------------------------------------
    # public operations

    def integrate_move(self, state: EngineState, move: DialogueMove) -> EngineState:
        """Dispatch one pending move through the rule table.

        Exactly one rule fires (highest priority, then declaration order); a
        move no rule accepts yields a negative understanding ICM instead of
        failing.
        """
        qud_before = [str(q) for q in state.info.shared.qud]
        for rule in self._rules:
            if rule.guard(state, move):
                new_state = rule.effect(state, move)
                record = {
                    "rule": rule.name,
                    "move": str(move),
                    "qud_before": qud_before,
                    "qud_after": [str(q) for q in new_state.info.shared.qud],
                }
                self.trace.append(record)
                if self.trace_hook:
                    self.trace_hook(record)
                return new_state
        # unreachable: the fallback rule guards everything
        raise EngineError(f"no rule accepted move {move}")

    def strategy_mode(self, state: EngineState) -> StrategyMode:
        if state.info.digressions:
            return StrategyMode(CONSTRUCTIVE)
        if state.proposals:
            return StrategyMode(COOPERATIVE)
        return StrategyMode(TASK_DRIVEN)

    def respond(self, state: EngineState, user_moves) -> tuple:
        """Integrate a user turn and select the system's answer moves."""
        info = record_utterance(state.info, USER, tuple(user_moves))
        state = state.with_info(info)
        for move in user_moves:
            state = self.integrate_move(state, move)
        return self.select_moves(state)

    def opening_turn(self, state: EngineState) -> tuple:
        """System-initiative first turn of a fresh session."""
        info = push_frame(state.info, PlanFrame(plan_name="Opening"))
        return self.select_moves(state.with_info(info))

    # ------------------------------------------------------------------
    # selection

    def select_moves(self, state: EngineState) -> tuple:
        """Emit grounding ICMs, then proposals, then plan progression moves."""
        emitted: list = []

        # 1. drain queued moves (grounding ICMs, reactions)
        agenda = []
        for action in state.info.private.agenda:
            if action.name == "say":
                emitted.append(action.args[0])
            else:
                agenda.append(action)
        info = replace(state.info, private=replace(state.info.private, agenda=tuple(agenda)))
        state = state.with_info(info)

        # 2. pending refinement proposal
        if state.proposals and not self._blocked(state.info, emitted):
            state, moves = self._emit_next_proposal(state)
            emitted.extend(moves)

        # 2b. voice an open accommodated/companion question left on top
        top = state.info.qud_top
        if (
            top is not None
            and top.kind in (WH, ALT)
            and top.predicate != "Definition"
            and not self._blocked(state.info, emitted)
            and not self._question_resolved(state.info, top)
            and not system_asked(state.info, top, emitted)
        ):
            move = DialogueMove(SYSTEM, "ask", top)
            emitted.append(move)

        # 3. plan progression
        state, moves = self._run_plans(state, emitted)
        emitted.extend(moves)

        # 4. empty agenda and empty plan: fall back to the choice question
        if (
            not state.info.private.plan
            and not state.proposals
            and not self._blocked(state.info, emitted)
            and not state.closed
        ):
            info = push_frame(state.info, PlanFrame(plan_name="Choice"))
            state, moves = self._run_plans(state.with_info(info), emitted)
            emitted.extend(moves)

        state = state.with_info(record_utterance(state.info, SYSTEM, tuple(emitted)))
        return state, tuple(emitted)

    def _emit_next_proposal(self, state: EngineState) -> tuple:
        head, rest = state.proposals[0], state.proposals[1:]
        state = replace(state, proposals=rest)
        kind, content = head
        if kind == "suggest":
            info = raise_question(
                state.info, Question(kind=POLAR, predicate=content.predicate, bound_args=content.args)
            )
            move = DialogueMove(SYSTEM, "suggest", content)
            return state.with_info(info), [move]
        if kind == "ask":
            info = raise_question(state.info, content)
            move = DialogueMove(SYSTEM, "ask", content)
            return state.with_info(info), [move]
        raise EngineError(f"unknown proposal kind {kind}")

    def _run_plans(self, state: EngineState, already_emitted=()) -> tuple:
        emitted: list = []
        guard = 0
        while state.info.private.plan:
            guard += 1
            if guard > 200:
                raise EngineError("plan progression does not settle")
            turn_moves = tuple(already_emitted) + tuple(emitted)
            frame = state.info.active_frame
            # incident sub-dialogues run regardless of pending outer questions
            blocked = not frame.embedded and self._blocked(state.info, turn_moves)
            plan = self.library.plan(frame.plan_name)
            item = planlib.next_item(plan, state.info, frame, self.registry, self.term_sorts)
            if item is DONE:
                # a finished frame closes even under a pending question,
                # unless the question is its own (it then awaits the answer)
                top = state.info.qud_top
                if blocked and top is not None and top.predicate in self._plan_question_predicates(plan):
                    break
                state, moves = self._close_frame(state)
                emitted.extend(moves)
                continue
            if blocked:
                break
            if item.kind == FINDOUT or item.kind == RAISE:
                q = item.question
                if self._question_resolved(state.info, q):
                    # resolved raise items are skipped unvoiced
                    info = update_top_frame(state.info, frame.complete(item.id))
                    state = state.with_info(info)
                    continue
                if q in state.info.shared.qud and system_asked(state.info, q, turn_moves):
                    break  # already voiced, waiting on the user
                state, moves = self._ask(state, q)
                emitted.extend(moves)
                frame = state.info.active_frame.mark_asked(item.id)
                if item.kind == RAISE:
                    frame = frame.complete(item.id)
                state = state.with_info(update_top_frame(state.info, frame))
                break
            if item.kind == DO:
                executor = self._executors.get(item.action.name)
                if executor is None:
                    raise EngineError(f"no executor for action {item.action.name}")
                info = update_top_frame(state.info, frame.complete(item.id))
                state, moves, stop = executor(state.with_info(info))
                emitted.extend(moves)
                if stop:
                    break
                continue
            if item.kind == ENTER:
                info = update_top_frame(state.info, frame.complete(item.id))
                target = self.library.plan(item.subdialogue)
                state, moves = self._announce_and_push(state.with_info(info), target)
                emitted.extend(moves)
                continue
            raise EngineError(f"unhandled item kind {item.kind}")
        return state, emitted

    def _announce_and_push(self, state: EngineState, plan: planlib.Plan) -> tuple:
        moves = []
        if plan.announce:
            moves.append(DialogueMove(SYSTEM, "informIntent", plan.action))
        info = push_frame(state.info, PlanFrame(plan_name=plan.name))
        return state.with_info(info), moves

    def _ask(self, state: EngineState, q: Question) -> tuple:
        info = state.info
        spec = self.registry.spec(q.predicate)
        if q.kind == POLAR and spec.wh_companion:
            info = self.accommodate_polar_open(info, q)
        else:
            info = raise_question(info, q)
        move = DialogueMove(SYSTEM, "ask", q)
        return state.with_info(info), [move]

    def _close_frame(self, state: EngineState, abandoned: bool = False) -> tuple:
        frame = state.info.active_frame
        plan = self.library.plan(frame.plan_name)
        info = pop_frame(state.info)
        info = self._drop_plan_questions(info, plan)
        info = self._clear_locals(info, plan) if abandoned is False else info
        info = commit(info, Proposition("done", (plan.action.name,)))
        state = state.with_info(info)
        moves = []
        if not abandoned and plan.close_inform:
            moves.append(DialogueMove(SYSTEM, "inform", Proposition(plan.close_inform)))
        if frame.embedded:
            # incident sub-dialogue: the governing dialogue resumes exactly
            state = self.close_digression(state)
            return state, moves
        if abandoned:
            return state, moves
        # sequence transition: only when no parent frame continues the walk
        parent = state.info.active_frame
        nxt = self.library.relations.next_in_sequence(plan.action.name)
        if parent is not None:
            # reopen the parent's enter item when the sequence points back at it
            if nxt is not None:
                parent_plan = self.library.plan(parent.plan_name)
                for it in parent_plan.items:
                    if it.kind == ENTER and it.id in parent.completed:
                        target = self.library.plan(it.subdialogue)
                        if target.action.name == nxt:
                            reopened = replace(
                                parent, completed=parent.completed - {it.id}
                            )
                            state = state.with_info(update_top_frame(state.info, reopened))
                            break
            return state, moves
        if nxt is not None:
            target = self.library.plan_for_action(nxt)
            if target is not None and planlib.precedence_satisfied(
                self.library.relations, Action(nxt), self._done_actions(state.info)
            ):
                state, more = self._announce_and_push(state, target)
                moves.extend(more)
        return state, moves

    def _done_actions(self, info: InformationState) -> frozenset:
        return frozenset(
            p.args[0]
            for p in info.shared.commitments
            if p.predicate == "done" and p.polarity == POSITIVE
        )

    # ------------------------------------------------------------------
    # accommodation

    def accommodate_polar_open(self, info: InformationState, polar_q: Question) -> InformationState:
        """Raise a polar question together with its implicit open companion.

        The companion sits just beneath the polar question so a typed short
        answer can resolve it directly; refusing the polar question cancels
        both.
        """
        spec = self.registry.spec(polar_q.predicate)
        if not spec.wh_companion:
            return raise_question(info, polar_q)
        companion = self.registry.wh_question(spec.wh_companion)
        info = raise_question(info, companion)
        return raise_question(info, polar_q)

    def accommodate_question_action(self, state: EngineState, polar_q: Question) -> EngineState:
        """Push the action associated with a positively resolved polar question."""
        spec = self.registry.spec(polar_q.predicate)
        if not spec.assoc_action:
            return state
        action = Action(spec.assoc_action)
        info = state.info
        info = replace(info, shared=replace(info.shared, actions=info.shared.actions + (action,)))
        return state.with_info(info)

    def _candidate_questions(self, state: EngineState, answer: Proposition):
        """(question, owner plan or None, active?) candidates resolving the answer."""
        seen = set()
        candidates = []
        # (a) items of the active plans, innermost first
        for frame in reversed(state.info.private.plan):
            plan = self.library.plan(frame.plan_name)
            for item in plan.items:
                if item.question is None:
                    continue
                q = item.question
                if str(q) in seen:
                    continue
                if self._resolves(answer, q):
                    candidates.append((q, plan, True))
                    seen.add(str(q))
        # (b) plans of sub-dialogues whose precedence is satisfied
        done = self._done_actions(state.info)
        active = {f.plan_name for f in state.info.private.plan}
        for plan in self.library.plans.values():
            if plan.name in active:
                continue
            if not planlib.precedence_satisfied(self.library.relations, plan.action, done):
                continue
            for item in plan.items:
                if item.question is None:
                    continue
                q = item.question
                if str(q) in seen:
                    continue
                if self._resolves(answer, q):
                    candidates.append((q, plan, False))
                    seen.add(str(q))
        # dynamic candidates: the audience refinement question
        if answer.predicate == "TypeRessource" and "altAudience" not in seen:
            q = self.registry.alt_question("TypeRessource")
            if self._resolves(answer, q):
                eval_plan = self.library.plan_for_action("EvaluationQuantitative")
                if eval_plan is not None and planlib.precedence_satisfied(
                    self.library.relations, eval_plan.action, done
                ):
                    candidates.append((q, eval_plan, eval_plan.name in active))
        return candidates

    def accommodate_question(self, state: EngineState, answer: Proposition):
        """Raise-and-resolve a question the answer presupposes.

        Returns (state, question) on a unique match, (state, NO_MATCH) when
        nothing fits; an ambiguous match raises AmbiguousAccommodation so the
        engine can ask the user to choose.
        """
        candidates = self._candidate_questions(state, answer)
        if not candidates:
            return state, NO_MATCH
        if len(candidates) > 1:
            raise AmbiguousAccommodation([c[0] for c in candidates])
        q, plan, active = candidates[0]
        if not active and plan.name not in ("Choice",):
            state = self.open_subdialogue(state, plan)
        info = raise_question(state.info, q)
        info = downdate(info, q, answer, self.registry, self.term_sorts)
        return state.with_info(info), q

    # ------------------------------------------------------------------
    # transitions

    TRANSITION_TRIGGERS = (
        "explicit-open-request",
        "informIntent-open",
        "explicit-close-check",
        "implicit-sequence",
        "relaunch",
        "collaborative-embed",
        "cooperative-jump",
        "subdialogue-accommodation",
    )

    def transition(self, state: EngineState, trigger: str, plan_name: Optional[str] = None) -> EngineState:
        """Route a sub-dialogue transition to its mechanism.

        Open-style triggers (explicit request, informIntent, cooperative
        jump, accommodation, relaunch) enter the named sub-dialogue after
        the precedence check; collaborative-embed snapshots the governing
        dialogue; explicit-close-check and implicit-sequence close the
        active frame, the latter letting the sequence relation pick the
        successor.
        """
        if trigger not in self.TRANSITION_TRIGGERS:
            raise EngineError(f"unknown transition trigger {trigger!r}")
        if trigger == "collaborative-embed":
            return self.embed_digression(state, plan_name)
        if trigger in ("explicit-close-check", "implicit-sequence"):
            state, moves = self._close_frame(state)
            return self._say(state, *moves)
        plan = self.library.plan(plan_name)
        if trigger in ("explicit-open-request", "informIntent-open", "cooperative-jump"):
            done = self._done_actions(state.info)
            if not planlib.precedence_satisfied(self.library.relations, plan.action, done):
                missing = self.library.relations.predecessors(plan.action.name) - done
                return self._say(
                    state,
                    self._icm("acceptance", "negative", Action(plan.action.name)),
                    DialogueMove(SYSTEM, "inform", Proposition("PrealableRequis", (sorted(missing)[0],))),
                )
        return self.open_subdialogue(state, plan)

    def _parent_of(self, plan_name: str) -> Optional[str]:
        for plan in self.library.plans.values():
            for item in plan.items:
                if item.kind == ENTER and item.subdialogue == plan_name:
                    return plan.name
        return None

    def open_subdialogue(self, state: EngineState, plan: planlib.Plan) -> EngineState:
        """Enter a sub-dialogue out of band (accommodation / explicit open).

        Frames above the target's parent are abandoned implicitly; a
        completed plan is relaunched with its local commitments cleared so
        its questions can be asked afresh.
        """
        parent = self._parent_of(plan.name)
        info = state.info
        while info.private.plan and info.private.plan[-1].plan_name not in (parent,):
            inner = self.library.plan(info.private.plan[-1].plan_name)
            info = pop_frame(info)
            info = self._drop_plan_questions(info, inner)
            info = commit(info, Proposition("done", (inner.action.name,)))
        relaunch = plan.action.name in self._done_actions(info)
        if relaunch:
            info = self._clear_locals(info, plan)
            info = retract(info, "done", (plan.action.name,))
        info = push_frame(info, PlanFrame(plan_name=plan.name))
        return state.with_info(info)

    def embed_digression(self, state: EngineState, plan_name: str) -> EngineState:
        """Collaborative embedding: snapshot, push, resume on close."""
        if len(state.info.digressions) >= MAX_DIGRESSION_DEPTH:
            raise EngineError("digression depth cap reached")
        info = snapshot_digression(state.info)
        info = push_frame(info, PlanFrame(plan_name=plan_name, embedded=True))
        return state.with_info(info)

    def close_digression(self, state: EngineState) -> EngineState:
        info = restore_digression(state.info)
        return state.with_info(info)

    # ------------------------------------------------------------------
    # rules

    def _build_rules(self):
        rules = [
            UpdateRule("ground_empty", 100, self._g_empty, self._e_empty),
            UpdateRule("greet", 90, self._g_greet, self._e_greet),
            UpdateRule("quit", 90, self._g_quit, self._e_quit),
            UpdateRule("request_close", 85, self._g_request_close, self._e_request_close),
            UpdateRule("request_definition", 85, self._g_request_definition, self._e_request_definition),
            UpdateRule("request_explain", 85, self._g_request_explain, self._e_request_explain),
            UpdateRule("request_synonym", 85, self._g_request_synonym, self._e_request_synonym),
            UpdateRule("request_generic", 80, self._g_request_generic, self._e_request_generic),
            UpdateRule("inform_intent", 78, self._g_inform_intent, self._e_inform_intent),
            UpdateRule("cancel_search", 76, self._g_cancel, self._e_cancel),
            UpdateRule("suggestion_verdict", 72, self._g_suggestion_verdict, self._e_suggestion_verdict),
            UpdateRule("decline_question", 70, self._g_decline, self._e_decline),
            UpdateRule("answer_move", 60, self._g_answer, self._e_answer),
            UpdateRule("fallback", 0, lambda s, m: True, self._e_unknown),
        ]
        return sorted(rules, key=lambda r: -r.priority)

    # -- guards / effects ------------------------------------------------

    def _g_empty(self, state, move):
        return move.act == "inform" and isinstance(move.content, Proposition) and move.content.predicate == "EnonceVide"

    def _e_empty(self, state, move):
        return self._say(state, self._icm("perception", "negative", Proposition("Repeter")))

    def _g_greet(self, state, move):
        return move.act == "greet"

    def _e_greet(self, state, move):
        if state.info.committed("Salutation"):
            return state
        if not state.info.private.plan:
            info = push_frame(state.info, PlanFrame(plan_name="Opening"))
            return state.with_info(info)
        return state

    def _g_quit(self, state, move):
        return move.act == "quit"

    def _e_quit(self, state, move):
        return self._enter_closing(state)

    def _enter_closing(self, state: EngineState) -> EngineState:
        info = state.info
        while info.private.plan:
            plan = self.library.plan(info.private.plan[-1].plan_name)
            info = pop_frame(info)
            info = self._drop_plan_questions(info, plan)
            info = commit(info, Proposition("done", (plan.action.name,)))
        info = push_frame(info, PlanFrame(plan_name="Closing"))
        return state.with_info(info)

    def _g_request_close(self, state, move):
        return (
            move.act in ("requestInfo", "ask")
            and isinstance(move.content, Question)
            and move.content.predicate == "Cloture"
        )

    def _e_request_close(self, state, move):
        q = move.content
        info = raise_question(state.info, q)
        info = commit(info, Proposition("Cloture"), single_answer=True)
        info = drop_question(info, q)
        state = state.with_info(info)
        state = self.accommodate_question_action(state, q)
        state = self._say(state, self._icm("acceptance", "positive", Action("Cloture")))
        return self._enter_closing(state)

    def _g_request_definition(self, state, move):
        return (
            move.act in ("requestInfo", "ask")
            and isinstance(move.content, Question)
            and move.content.predicate == "Definition"
        )

    def _e_request_definition(self, state, move):
        if len(state.info.digressions) >= MAX_DIGRESSION_DEPTH:
            return self._say(
                state,
                self._icm("acceptance", "negative", Proposition("RefusDigression")),
            )
        info = raise_question(state.info, move.content)
        state = state.with_info(info)
        return self.embed_digression(state, "DefineTerm")

    def _g_request_explain(self, state, move):
        return (
            move.act in ("requestInfo", "ask")
            and isinstance(move.content, Question)
            and move.content.predicate == "ExplicationSysteme"
        )

    def _e_request_explain(self, state, move):
        if len(state.info.digressions) >= MAX_DIGRESSION_DEPTH:
            return self._say(
                state,
                self._icm("acceptance", "negative", Proposition("RefusDigression")),
            )
        info = raise_question(state.info, move.content)
        info = commit(info, Proposition("ExplicationSysteme"), single_answer=True)
        info = drop_question(info, move.content)
        state = state.with_info(info)
        return self.embed_digression(state, "ExplainSystem")

    def _g_request_synonym(self, state, move):
        return (
            move.act in ("requestInfo", "ask")
            and isinstance(move.content, Question)
            and move.content.predicate == "TermeSynonyme"
        )

    def _e_request_synonym(self, state, move):
        q = move.content
        term_id = q.bound_args[0]
        entry = self.terminology.entry(term_id)
        synonyms = taskmodel.suggest_related(self.terminology, entry, "synonym")
        if synonyms:
            prop = Proposition("TermeSynonyme", (term_id, synonyms[0]))
            info = raise_question(state.info, q)
            info = downdate(info, q, prop, self.registry, self.term_sorts)
            return self._say(state.with_info(info), DialogueMove(SYSTEM, "inform", prop))
        return self._say(
            state,
            DialogueMove(SYSTEM, "inform", Proposition("TermeSynonyme", (term_id, ""), NEGATIVE)),
        )

    def _g_request_generic(self, state, move):
        return move.act in ("requestInfo", "ask") and isinstance(move.content, Question)

    def _e_request_generic(self, state, move):
        info = raise_question(state.info, move.content)
        return self._say(
            state.with_info(info),
            self._icm("understanding", "negative", Proposition("Incompris")),
        )

    def _g_inform_intent(self, state, move):
        return move.act == "informIntent" and isinstance(move.content, Action)

    def _e_inform_intent(self, state, move):
        """Explicit open request: enter the sub-dialogue if precedence allows.

        Opening a new sub-dialogue implicitly closes the current one, so the
        precedence check runs against the post-close done set.
        """
        target = self.library.plan_for_action(move.content.name)
        if target is None:
            return self._say(state, self._icm("understanding", "negative", Proposition("Incompris")))
        # simulate implicit closes down to the target's parent
        done = set(self._done_actions(state.info))
        parent = self._parent_of(target.name)
        for frame in reversed(state.info.private.plan):
            if frame.plan_name == parent:
                break
            done.add(self.library.plan(frame.plan_name).action.name)
        if not planlib.precedence_satisfied(self.library.relations, target.action, frozenset(done)):
            missing = self.library.relations.predecessors(target.action.name) - frozenset(done)
            reason = sorted(missing)[0] if missing else target.action.name
            return self._say(
                state,
                self._icm("acceptance", "negative", Action(target.action.name)),
                DialogueMove(SYSTEM, "inform", Proposition("PrealableRequis", (reason,))),
            )
        state = self._say(state, self._icm("acceptance", "positive", Action(target.action.name)))
        return self.open_subdialogue(state, target)

    def _g_cancel(self, state, move):
        return (
            move.act == "inform"
            and isinstance(move.content, Proposition)
            and move.content.predicate == "RechercheAnnulee"
        )

    def _e_cancel(self, state, move):
        """Explicit cancel: abandon the active search and fall back to Choice."""
        info = state.info
        while info.private.plan:
            plan = self.library.plan(info.private.plan[-1].plan_name)
            info = pop_frame(info)
            info = self._drop_plan_questions(info, plan)
            info = commit(info, Proposition("done", (plan.action.name,)))
        info = commit(info, Proposition("RechercheAnnulee"))
        info = push_frame(info, PlanFrame(plan_name="Choice"))
        state = state.with_info(info)
        state = replace(state, proposals=())
        return self._say(state, self._icm("acceptance", "positive", Proposition("RechercheAnnulee")))

    def _g_suggestion_verdict(self, state, move):
        if move.act not in ("answer", "shortAnswer") or not isinstance(move.content, Proposition):
            return False
        pred = move.content.predicate
        if pred not in ("Specialiser", "Elargir", "RemplacementQualificatif", "AjoutMotCleHyperonyme") and not (
            pred in QUERY_PREDICATES or pred == "SuppressionTermeRequete"
        ):
            return pred == "TypeRessource"
        # answers to system suggestions: the polar question is on the QUD
        for q in state.info.shared.qud:
            if q.kind == POLAR and q.predicate == pred and q.bound_args == move.content.args:
                return True
        return pred == "TypeRessource"

    def _e_suggestion_verdict(self, state, move):
        """User verdict on a system suggestion (approval awaited)."""
        prop = move.content
        if prop.predicate == "TypeRessource":
            return self._e_audience_answer(state, move)
        q = Question(kind=POLAR, predicate=prop.predicate, bound_args=prop.args)
        info = drop_question(state.info, q)
        state = state.with_info(info)
        if prop.polarity == POSITIVE:
            state = state.with_info(commit(state.info, prop))
            state = self._apply_query_operation(state, prop)
        state = self._say(state, self._icm("acceptance", "positive", prop))
        if prop.predicate == "Specialiser":
            if prop.polarity == POSITIVE:
                return self._queue_specialization(state)
            return self._ask_extension_question(state)
        if prop.predicate == "Elargir":
            if prop.polarity == POSITIVE:
                return self._queue_broadening(state)
            return self._ask_extension_question(state)
        # query operation verdict: once the proposal queue is empty, retest
        if not state.proposals:
            state = self._relaunch_test(state)
        return state

    def _e_audience_answer(self, state, move):
        prop = move.content
        q = self.registry.alt_question("TypeRessource")
        info = state.info
        if q in info.shared.qud:
            info = downdate(info, q, prop, self.registry, self.term_sorts)
        else:
            info = commit(info, prop, single_answer=True)
        state = state.with_info(info)
        audience = prop.args[0]
        entry = self.terminology.lookup_label(audience, taskmodel.RESOURCE_TYPE)
        state = self._say(state, self._icm("acceptance", "positive", prop))
        if entry is not None and prop.polarity == POSITIVE:
            suggestion = ("suggest", Proposition("AjoutTypeRessource", (entry.id,)))
            state = replace(state, proposals=(suggestion,) + state.proposals)
        return state

    def _g_decline(self, state, move):
        return (
            move.act in ("answer", "shortAnswer")
            and isinstance(move.content, Proposition)
            and move.content.predicate == "RefusQuestion"
        )

    def _e_decline(self, state, move):
        """Declining an open wh question: cancel it and move the plan on."""
        predicate = str(move.content.args[0])
        target = None
        for q in reversed(state.info.shared.qud):
            if q.predicate == predicate:
                target = q
                break
        state = self._say(state, self._icm("acceptance", "positive", move.content))
        if target is None:
            return state
        info = drop_question(state.info, target)
        frames = list(info.private.plan)
        for i in range(len(frames) - 1, -1, -1):
            plan = self.library.plan(frames[i].plan_name)
            matched = False
            for item in plan.items:
                if item.question is not None and item.question.predicate == predicate:
                    frames[i] = frames[i].complete(item.id)
                    matched = True
            if matched:
                break
        info = replace(info, private=replace(info.private, plan=tuple(frames)))
        return state.with_info(info)

    def _g_answer(self, state, move):
        return move.act in ("answer", "shortAnswer", "inform", "suggest") and isinstance(
            move.content, Proposition
        )

    def _e_answer(self, state, move):
        """Core answer integration with accommodation and grounding."""
        prop = move.content
        try:
            self.registry.check(prop)
        except Exception:
            return self._e_unknown(state, move)

        if "abandon" in move.flags and state.info.qud_top is not None:
            state = state.with_info(self._cancel_question(state.info, state.info.qud_top))

        if "correction" in move.flags:
            state = self._retract_last_answer(state, prop.predicate)

        # single-answer query questions: a new answer is a correction, so
        # the replaced term leaves the query too
        if prop.predicate in QUERY_PREDICATES and not self.registry.spec(prop.predicate).multi_answer:
            for old in state.info.committed(prop.predicate):
                if old.args != prop.args and str(old.args[0]) in self.terminology:
                    query, _ = remove_term(state.query, self.terminology.entry(old.args[0]))
                    state = replace(state, query=query)

        target = self._find_target_question(state.info, prop)
        accommodated = False
        if target is None and prop.predicate in (
            "SuppressionTermeRequete",
            "RemplacementQualificatif",
            "AjoutMotCleHyperonyme",
        ):
            # query revision operations need no owning question on the QUD
            state = state.with_info(
                commit(state.info, prop, single_answer=not self.registry.spec(prop.predicate).multi_answer)
            )
        elif target is None:
            try:
                state, outcome = self.accommodate_question(state, prop)
            except AmbiguousAccommodation as exc:
                return self._ask_choice(state, exc.candidates, prop)
            if outcome == NO_MATCH:
                return self._e_unknown(state, move)
            target = outcome
            accommodated = True
        else:
            state = state.with_info(self._integrate_answer(state.info, target, prop))

        # grounding ICMs: understanding-level echo, then acceptance
        icms = []
        if move.speaker == USER:
            if move.act == "suggest":
                icms.append(self._icm("semantic", "positive", prop))
            if prop.predicate in ECHO_PREDICATES and prop.polarity == POSITIVE:
                icms.append(self._icm("understanding", "positive", prop))
            icms.append(self._icm("acceptance", "positive", prop))
        state = self._say(state, *icms)

        if target is not None and target.kind == POLAR and prop.polarity == POSITIVE:
            # an affirmative defers content: voice the implicit companion
            spec = self.registry.spec(target.predicate)
            if spec.wh_companion:
                companion = self.registry.wh_question(spec.wh_companion)
                if companion in state.info.shared.qud:
                    state = self._say(state, DialogueMove(SYSTEM, "ask", companion))

        state = self._after_answer(state, move, target, prop, accommodated)
        return state

    def _find_target_question(self, info: InformationState, prop: Proposition) -> Optional[Question]:
        for q in reversed(info.shared.qud):
            if self._resolves(prop, q):
                return q
            if q.kind == POLAR:
                spec = self.registry.spec(q.predicate)
                if spec.wh_companion:
                    companion = self.registry.wh_question(spec.wh_companion)
                    if self._resolves(prop, companion):
                        return q if prop.predicate == q.predicate else companion
        return None

    def _integrate_answer(self, info: InformationState, q: Question, prop: Proposition) -> InformationState:
        """Downdate ``q`` with ``prop``, handling polar/companion pairs."""
        if q.kind == POLAR:
            spec = self.registry.spec(q.predicate)
            if q.predicate == prop.predicate:
                info = downdate(info, q, prop, self.registry, self.term_sorts)
                if spec.wh_companion:
                    companion = self.registry.wh_question(spec.wh_companion)
                    if prop.polarity == NEGATIVE:
                        # refusal cancels the implicit open question too
                        info = self._cancel_question(info, companion)
                return info
        if q.kind == WH:
            # a typed answer to the companion also settles the hosting polar
            info = downdate(info, q, prop, self.registry, self.term_sorts)
            for polar in tuple(info.shared.qud):
                if polar.kind != POLAR:
                    continue
                spec = self.registry.spec(polar.predicate)
                if spec.wh_companion == q.predicate:
                    info = commit(info, Proposition(polar.predicate, polar.bound_args), single_answer=True)
                    info = drop_question(info, polar)
            return info
        return downdate(info, q, prop, self.registry, self.term_sorts)

    def _cancel_question(self, info: InformationState, q: Question) -> InformationState:
        return drop_question(info, q)

    def _retract_last_answer(self, state: EngineState, predicate: str) -> EngineState:
        """Drop the most recent commitment on ``predicate`` (marker \"plutôt\")."""
        existing = state.info.committed(predicate)
        if not existing:
            return state
        old = existing[-1]
        state = state.with_info(retract(state.info, old.predicate, old.args))
        if predicate in QUERY_PREDICATES and old.args and str(old.args[0]) in self.terminology:
            query, _ = remove_term(state.query, self.terminology.entry(old.args[0]))
            state = replace(state, query=query)
        return state

    def _after_answer(self, state, move, target, prop, accommodated) -> EngineState:
        """Task-side effects after an answer joined the commitments."""
        pred = prop.predicate
        if pred == "AjoutTerme" and prop.polarity == POSITIVE:
            # generic add: retype by the entry's terminology kind
            entry = self.terminology.entry(prop.args[0])
            from .interpreter import ROLE_PREDICATE

            typed = Proposition(ROLE_PREDICATE[entry.kind], prop.args)
            state = state.with_info(
                commit(state.info, typed, single_answer=not self.registry.spec(typed.predicate).multi_answer)
            )
            return self._after_answer(state, move, target, typed, accommodated)
        if pred in QUERY_PREDICATES or pred in (
            "SuppressionTermeRequete",
            "RemplacementQualificatif",
            "AjoutMotCleHyperonyme",
        ):
            if prop.polarity == POSITIVE:
                state = self._apply_query_operation(state, prop)
                state = self._note_terms(state, prop)
                if move.speaker == USER and self._in_construction(state):
                    state = self._offer_more(state)
                elif move.speaker == USER and self._test_phase_reached(state):
                    # new term volunteered during or after the test phase:
                    # implicit return to construction, then the offer
                    state = self._reopen_construction(state)
                    state = self._offer_more(state)
            return state
        if pred == "AjoutAutreChose" and prop.polarity == NEGATIVE:
            # construction declined to continue: close it now so the launch
            # follows within the same turn
            if state.info.active_frame and state.info.active_frame.plan_name == "QueryConstruction":
                state, moves = self._close_frame(state)
                state = self._say(state, *moves)
            return state
        if pred == "ValidationRequete" and prop.polarity == NEGATIVE:
            return self._reopen_construction(state)
        if pred == "AutreRecherche" and prop.polarity == POSITIVE:
            return self._relaunch_sequence(state)
        if pred == "ChoixReprise":
            state = state.with_info(retract(state.info, "RechercheAnnulee"))
            choice = str(prop.args[0])
            if choice == "nouvelle recherche":
                return self._relaunch_sequence(state)
            if choice == "clore le dialogue":
                return self._enter_closing(state)
            return self._reopen_construction(state)
        if pred == "Cloture" and prop.polarity == POSITIVE:
            state = self.accommodate_question_action(
                state, Question(kind=POLAR, predicate="Cloture")
            )
            return self._enter_closing(state)
        return state

    def _test_phase_reached(self, state: EngineState) -> bool:
        if any(
            f.plan_name in ("QueryTest", "LaunchQuery", "QuantitativeEvaluation",
                            "ListDescription", "DocumentSelection")
            for f in state.info.private.plan
        ):
            return True
        return "LancementRequete" in self._done_actions(state.info)

    def _in_construction(self, state: EngineState) -> bool:
        return any(f.plan_name == "QueryConstruction" for f in state.info.private.plan)

    def _offer_more(self, state: EngineState) -> EngineState:
        q = self.registry.polar_question("AjoutAutreChose")
        info = retract(state.info, "AjoutAutreChose")
        spec = self.registry.spec("AjoutAutreChose")
        info = self.accommodate_polar_open(info, q) if spec.wh_companion else raise_question(info, q)
        state = state.with_info(info)
        return self._say(state, DialogueMove(SYSTEM, "ask", q))

    # -- query side-effects -------------------------------------------------

    def _apply_query_operation(self, state: EngineState, prop: Proposition) -> EngineState:
        query = state.query
        pred = prop.predicate
        if pred in QUERY_PREDICATES:
            entry = self.terminology.entry(prop.args[0])
            try:
                query = add_term(query, entry, QUERY_PREDICATES[pred])
            except RoleError:
                return self._say(
                    state, self._icm("semantic", "negative", prop)
                )
        elif pred == "SuppressionTermeRequete":
            entry = self.terminology.entry(prop.args[0])
            query, removed = remove_term(query, entry)
            if not removed:
                return self._say(
                    state,
                    DialogueMove(SYSTEM, "inform", Proposition("TermeAbsent", (entry.id,))),
                )
        elif pred == "RemplacementQualificatif":
            old = self.terminology.entry(prop.args[0])
            new = self.terminology.entry(prop.args[1])
            query, _ = remove_term(query, old)
            query = add_term(query, new, taskmodel.QUALIFIER)
        elif pred == "AjoutMotCleHyperonyme":
            narrow = self.terminology.entry(prop.args[0])
            broad = self.terminology.entry(prop.args[1])
            query, _ = remove_term(query, narrow)
            query = add_term(query, broad, taskmodel.KEYWORD)
        return replace(state, query=query)

    # -- refinement ----------------------------------------------------------

    def _queue_specialization(self, state: EngineState) -> EngineState:
        """Refinement proposals after a too-many verdict.

        Qualifier-based precision first (narrower qualifiers associated with
        a query keyword, then qualifier-to-keyword expansion), then the
        audience question; narrower-keyword proposals only when no
        qualifier route exists.
        """
        proposals = []
        query = state.query
        for qid in query.qualifiers:
            entry = self.terminology.entry(qid)
            for narrow in taskmodel.suggest_related(self.terminology, entry, "narrower"):
                if narrow.id in query.qualifiers:
                    continue
                if any(
                    narrow.id in self.terminology.entry(k).associated_qualifiers
                    for k in query.keywords
                ):
                    proposals.append(
                        ("suggest", Proposition("RemplacementQualificatif", (qid, narrow.id)))
                    )
        for qid in query.qualifiers:
            label = self.terminology.label(qid)
            kw = self.terminology.lookup_label(label, taskmodel.KEYWORD)
            if kw is not None and kw.id not in query.keywords:
                proposals.append(("suggest", Proposition("AjoutMotCle", (kw.id,))))
        if not proposals:
            for kid in query.keywords:
                entry = self.terminology.entry(kid)
                for narrow in taskmodel.suggest_related(self.terminology, entry, "narrower"):
                    proposals.append(("suggest", Proposition("AjoutMotCle", (narrow.id,))))
        if not query.resource_types:
            proposals.append(("ask", self.registry.alt_question("TypeRessource")))
        return replace(state, proposals=tuple(proposals))

    def _queue_broadening(self, state: EngineState) -> EngineState:
        """Broadening proposals after an empty verdict."""
        proposals = []
        query = state.query
        terms = query.terms()
        if terms:
            last = terms[-1]
            proposals.append(("suggest", Proposition("SuppressionTermeRequete", (last,))))
        for kid in query.keywords:
            entry = self.terminology.entry(kid)
            for broad in taskmodel.suggest_related(self.terminology, entry, "broader"):
                proposals.append(("suggest", Proposition("AjoutMotCleHyperonyme", (kid, broad.id))))
        return replace(state, proposals=tuple(proposals))

    def _ask_extension_question(self, state: EngineState) -> EngineState:
        q = self.registry.polar_question("AutreQuestion")
        state = replace(state, proposals=())
        info = self.accommodate_polar_open(state.info, q)
        state = state.with_info(info)
        return self._say(state, DialogueMove(SYSTEM, "ask", q))

    def _relaunch_test(self, state: EngineState) -> EngineState:
        """Re-enter the query test after refinement settled."""
        target = self.library.plan("QueryTest")
        return self.open_subdialogue(state, target)

    def _reopen_construction(self, state: EngineState) -> EngineState:
        target = self.library.plan("QueryConstruction")
        return self.open_subdialogue(state, target)

    def _relaunch_sequence(self, state: EngineState) -> EngineState:
        target = self.library.plan("SearchSequence")
        return self.open_subdialogue(state, target)

    def _ask_choice(self, state: EngineState, candidates, prop: Proposition) -> EngineState:
        alternatives = []
        for q in candidates:
            if q.kind == WH:
                args = list(q.bound_args)
                args.insert(q.wh_index, prop.args[q.wh_index] if q.wh_index < len(prop.args) else prop.args[0])
                alternatives.append(Proposition(q.predicate, tuple(args)))
        if len(alternatives) < 2:
            return self._say(state, self._icm("understanding", "negative", Proposition("Incompris")))
        choice = Question(kind=ALT, predicate="ChoixAjout", alternatives=tuple(alternatives))
        info = raise_question(state.info, choice)
        state = state.with_info(info)
        return self._say(state, DialogueMove(SYSTEM, "ask", choice))

    def _e_unknown(self, state, move):
        return self._say(state, self._icm("understanding", "negative", Proposition("Incompris")))

    # ------------------------------------------------------------------
    # plan action executors: (state) -> (state, moves, stop)

    def _exec_salutation(self, state: EngineState):
        info = commit(state.info, Proposition("Salutation"))
        move = DialogueMove(SYSTEM, "greet", Proposition("Salutation"))
        return state.with_info(info), [move], False

    def _exec_init_query(self, state: EngineState):
        """Auto-add terminology hits from the committed initial request."""
        moves = []
        texts = [
            p.args[0]
            for p in state.info.shared.commitments
            if p.predicate in ("RequeteInitiale", "PrecisionsGenerales") and p.polarity == POSITIVE
        ]
        from .interpreter import match_terms, normalize

        for text in texts:
            try:
                tokens = normalize(str(text))
            except Exception:
                continue
            for _span, entry, _role in match_terms(tokens, self.terminology):
                if entry.kind != taskmodel.KEYWORD:
                    continue
                if entry.id in state.query.keywords:
                    continue
                prop = Proposition("AjoutMotCle", (entry.id,))
                state = state.with_info(commit(state.info, prop))
                state = self._apply_query_operation(state, prop)
                state = self._note_terms(state, prop)
                moves.append(DialogueMove(SYSTEM, "inform", prop))
        return state, moves, False

    def _exec_recap(self, state: EngineState):
        canonical = state.query.canonical(self.terminology)
        move = DialogueMove(SYSTEM, "inform", Proposition("RecapRequete", (canonical,)))
        return state, [move], False

    def _exec_launch(self, state: EngineState):
        try:
            docs = self.store.execute_query(state.query)
        except LaunchError:
            move = DialogueMove(SYSTEM, "inform", Proposition("RequeteVide"))
            state = self._reopen_construction(state)
            return state, [move], True
        state = replace(state, results=tuple(d.id for d in docs))
        moves = [DialogueMove(SYSTEM, "inform", Proposition("LancementRequete"))]
        if docs:
            moves.append(DialogueMove(SYSTEM, "inform", Proposition("MemorisationRequete")))
        return state, moves, False

    def _exec_evaluate(self, state: EngineState):
        count = len(state.results or ())
        verdict = evaluate_results(count, self.too_many_threshold)
        info = commit(state.info, Proposition("NombreResultats", (count,)), single_answer=True)
        info = commit(info, Proposition("VerdictRequete", (verdict,)), single_answer=True)
        state = state.with_info(info)
        moves = [DialogueMove(SYSTEM, "inform", Proposition("NombreResultats", (count,)))]
        if verdict == taskmodel.TOO_MANY:
            prop = Proposition("Specialiser")
            info = raise_question(state.info, Question(kind=POLAR, predicate="Specialiser"))
            state = state.with_info(info)
            moves.append(DialogueMove(SYSTEM, "suggest", prop))
            return state, moves, True
        if verdict == taskmodel.EMPTY:
            prop = Proposition("Elargir")
            info = raise_question(state.info, Question(kind=POLAR, predicate="Elargir"))
            state = state.with_info(info)
            moves.append(DialogueMove(SYSTEM, "suggest", prop))
            return state, moves, True
        info = commit(state.info, Proposition("VerdictAcceptable"))
        return state.with_info(info), moves, False

    def _exec_list_description(self, state: EngineState):
        ids = state.results or ()
        titles = " ".join(
            f"{i}. {self.store.document(doc_id).title}" for i, doc_id in enumerate(ids, start=1)
        )
        moves = [
            DialogueMove(SYSTEM, "inform", Proposition("TitresDocuments", (titles,))),
            DialogueMove(SYSTEM, "inform", Proposition("LancementEvaluation")),
        ]
        return state, moves, False

    def _exec_present_document(self, state: EngineState):
        chosen = state.info.committed("SelectionDocument")
        if not chosen or not state.results:
            return state, [], False
        number = chosen[-1].args[0]
        try:
            index = int(number) - 1
            doc_id = state.results[index]
        except (ValueError, IndexError):
            move = DialogueMove(SYSTEM, "inform", Proposition("DocumentIntrouvable", (number,)))
            return state, [move], False
        doc = self.store.document(doc_id)
        move = DialogueMove(
            SYSTEM, "inform", Proposition("DocumentSelectionne", (doc.title, doc.description))
        )
        return state, [move], False

    def _exec_answer_definition(self, state: EngineState):
        pending = None
        for q in reversed(state.info.shared.qud):
            if q.predicate == "Definition":
                pending = q
                break
        if pending is None:
            return state, [], False
        subject = str(pending.bound_args[0])
        text = self.definitions.get(_fold_key(subject))
        if text is None:
            entry = self.terminology.lookup_label(subject)
            if entry is not None:
                kind_word = {
                    taskmodel.KEYWORD: "mot clé",
                    taskmodel.QUALIFIER: "qualificatif",
                    taskmodel.METATERM: "métaterme",
                    taskmodel.RESOURCE_TYPE: "type de ressource",
                }[entry.kind]
                text = f"{entry.label} est un {kind_word} de la terminologie du catalogue."
        prop = (
            Proposition("Definition", (subject, text))
            if text is not None
            else Proposition("Definition", (subject, ""), NEGATIVE)
        )
        info = state.info
        if text is not None:
            info = downdate(info, pending, prop, self.registry, self.term_sorts)
        else:
            info = drop_question(info, pending)
        state = state.with_info(info)
        return state, [DialogueMove(SYSTEM, "inform", prop)], False

    def _exec_explain_system(self, state: EngineState):
        move = DialogueMove(SYSTEM, "inform", Proposition("SystemeExplique"))
        return state, [move], False

    def _exec_farewell(self, state: EngineState):
        state = replace(state, closed=True)
        move = DialogueMove(SYSTEM, "quit", Proposition("Adieu"))
        return state, [move], False


def _fold_key(text: str) -> str:
    import unicodedata

    folded = unicodedata.normalize("NFD", text.lower())
    return "".join(ch for ch in folded if not unicodedata.combining(ch)).strip()
