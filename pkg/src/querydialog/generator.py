"""Template-based realization of system moves.

Templates are fixtures: one table per language, keyed by act (or ICM tag),
content predicate and optionally content polarity, most specific key first.
Slots are named after the predicate's declared argument names; terminology
ids are rendered through their labels.  A missing slot value fails loud,
a silent (empty) template drops the move from the surface form.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass
from typing import Optional

from .core import (
    Action,
    DialogueMove,
    NEGATIVE,
    PredicateRegistry,
    Proposition,
    Question,
)
from .taskmodel import Terminology


class RealizationError(Exception):
    """No template found, or a template slot has no value."""


class TemplateLoadError(Exception):
    """Malformed template source."""


@dataclass(frozen=True)
class TemplateTable:
    entries: dict  # key -> template string
    language: str = "fr"

    @staticmethod
    def parse(source: str, language: str = "fr") -> "TemplateTable":
        entries = {}
        for lineno, raw in enumerate(source.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                tokens = shlex.split(line)
            except ValueError as exc:
                raise TemplateLoadError(f"templates line {lineno}: {exc}") from None
            if tokens[0] != "template" or len(tokens) != 3:
                raise TemplateLoadError(f"templates line {lineno}: expected template key \"text\"")
            key, text = tokens[1], tokens[2]
            if key in entries:
                raise TemplateLoadError(f"templates line {lineno}: duplicate key {key!r}")
            entries[key] = text
        return TemplateTable(entries=entries, language=language)

    def lookup(self, keys) -> Optional[str]:
        for key in keys:
            if key in self.entries:
                return self.entries[key]
        return None


def _move_keys(move: DialogueMove) -> list:
    act = move.icm_tag or move.act
    content = move.content
    keys = []
    if isinstance(content, Proposition):
        if content.polarity == NEGATIVE:
            keys.append(f"{act}:{content.predicate}:negative")
        keys.append(f"{act}:{content.predicate}")
    elif isinstance(content, Question):
        keys.append(f"{act}:{content.predicate}")
    elif isinstance(content, Action):
        keys.append(f"{act}:{content.name}")
    keys.append(act)
    return keys


class Generator:
    def __init__(self, table: TemplateTable, registry: PredicateRegistry, terminology: Terminology):
        self.table = table
        self.registry = registry
        self.terminology = terminology

    def _render_value(self, value) -> str:
        value = str(value)
        if value in self.terminology:
            return self.terminology.label(value)
        return value

    def _slots(self, content) -> dict:
        slots = {}
        if isinstance(content, Proposition):
            try:
                spec = self.registry.spec(content.predicate)
                names = spec.arg_names
            except Exception:
                names = ()
            for i, arg in enumerate(content.args):
                name = names[i] if i < len(names) else f"arg{i}"
                slots[name] = self._render_value(arg)
        elif isinstance(content, Question):
            try:
                spec = self.registry.spec(content.predicate)
                names = spec.arg_names
            except Exception:
                names = ()
            for i, arg in enumerate(content.bound_args):
                name = names[i] if i < len(names) else f"arg{i}"
                slots[name] = self._render_value(arg)
            if content.alternatives:
                slots["alternatives"] = " ou ".join(
                    self._render_alternative(alt) for alt in content.alternatives
                )
        elif isinstance(content, Action):
            for i, arg in enumerate(content.args):
                slots[f"arg{i}"] = self._render_value(arg)
        return slots

    def _render_alternative(self, alt: Proposition) -> str:
        template = self.table.lookup([f"alt:{alt.predicate}"])
        if template is None:
            return " ".join(self._render_value(a) for a in alt.args)
        return self._fill(template, self._slots(alt), f"alt:{alt.predicate}")

    def _fill(self, template: str, slots: dict, key: str) -> str:
        try:
            return template.format(**slots)
        except KeyError as exc:
            raise RealizationError(f"template {key!r} needs slot {exc.args[0]!r}") from None

    def realize_move(self, move: DialogueMove) -> str:
        keys = _move_keys(move)
        template = self.table.lookup(keys)
        if template is None:
            raise RealizationError(f"no template for move {move} (tried {keys})")
        return self._fill(template, self._slots(move.content), keys[0])

    def realize(self, moves) -> str:
        """Realize a move sequence into one utterance.

        Templates carry their own leading connective where the surface style
        requires one, so moves are joined with single spaces; empty
        realizations are dropped.
        """
        if not moves:
            raise RealizationError("no moves to realize")
        parts = []
        for move in moves:
            text = self.realize_move(move)
            if text:
                parts.append(text)
        return " ".join(parts)
