"""Fixture loading and runtime assembly.

All declarative resources (predicate registry, plan library, terminology,
document corpus, marker lexicon, cue patterns, templates, definitions) load
from line-oriented text files.  Paths resolve in order: explicit argument,
``QUERYDIALOG_<NAME>`` environment variable, bundled default under
``querydialog/data``.
"""

from __future__ import annotations

import os
import shlex
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .core import PredicateRegistry, PredicateSpec
from .engine import Engine
from .generator import Generator, TemplateTable
from .interpreter import CuePatterns, Interpreter, MarkerLexicon
from .plans import PlanLibrary, load_plans
from .taskmodel import (
    DEFAULT_TOO_MANY,
    DocumentStore,
    Terminology,
    load_documents,
    load_terminology,
)


class ConfigError(Exception):
    pass


DATA_FILES = {
    "predicates": "predicates.txt",
    "plans": "plans.txt",
    "terminology": "terminology.txt",
    "corpus": "corpus.txt",
    "definitions": "definitions_fr.txt",
    "templates": "templates_fr.txt",
    "lexicon": "lexicon_fr.txt",
    "patterns": "patterns_fr.txt",
}

ENV_PREFIX = "QUERYDIALOG_"


@dataclass(frozen=True)
class RuntimeConfig:
    """Resolved paths plus engine knobs."""

    predicates: Optional[str] = None
    plans: Optional[str] = None
    terminology: Optional[str] = None
    corpus: Optional[str] = None
    definitions: Optional[str] = None
    templates: Optional[str] = None
    lexicon: Optional[str] = None
    patterns: Optional[str] = None
    language: str = "fr"
    too_many_threshold: int = DEFAULT_TOO_MANY
    transcript_dir: Optional[str] = None


def _read(name: str, override: Optional[str], language: str) -> str:
    env = os.environ.get(ENV_PREFIX + name.upper())
    path = override or env
    if path:
        return Path(path).read_text(encoding="utf-8")
    filename = DATA_FILES[name]
    if name in ("templates", "lexicon", "patterns", "definitions"):
        filename = filename.replace("_fr", f"_{language}")
    return resources.files("querydialog.data").joinpath(filename).read_text(encoding="utf-8")


def load_registry(source: str) -> PredicateRegistry:
    """Parse ``sort`` and ``predicate`` records::

        sort audience values=patient,médecin
        predicate AjoutMotCle args=m:motcle multi=yes
        predicate Cloture action=Cloture
        predicate Precisions companion=PrecisionsGenerales
    """
    specs = []
    sort_values: dict = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = shlex.split(line)
        head = tokens[0]
        if head == "sort":
            name = tokens[1]
            values: tuple = ()
            for tok in tokens[2:]:
                if tok.startswith("values="):
                    values = tuple(v for v in tok.split("=", 1)[1].split(",") if v)
            sort_values[name] = values
            continue
        if head != "predicate":
            raise ConfigError(f"predicates line {lineno}: unknown record {head!r}")
        name = tokens[1]
        args: tuple = ()
        multi = False
        companion = None
        action = None
        label = None
        for tok in tokens[2:]:
            key, _, value = tok.partition("=")
            if key == "args":
                parsed = []
                for part in value.split(","):
                    if not part:
                        continue
                    if ":" not in part:
                        raise ConfigError(f"predicates line {lineno}: arg {part!r} needs name:sort")
                    arg_name, sort = part.split(":", 1)
                    parsed.append((arg_name, sort))
                args = tuple(parsed)
            elif key == "multi":
                multi = value == "yes"
            elif key == "companion":
                companion = value
            elif key == "action":
                action = value
            elif key == "label":
                label = value
            else:
                raise ConfigError(f"predicates line {lineno}: unknown option {key!r}")
        specs.append(
            PredicateSpec(
                name=name,
                args=args,
                multi_answer=multi,
                wh_companion=companion,
                assoc_action=action,
                label=label,
            )
        )
    registry = PredicateRegistry(specs, sort_values)
    for spec in registry:
        if spec.wh_companion and spec.wh_companion not in registry:
            raise ConfigError(f"{spec.name}: unknown companion {spec.wh_companion!r}")
    return registry


def load_definitions(source: str) -> dict:
    """Parse ``define "subject" "text"`` records, folded for lookup."""
    import unicodedata

    def fold(text: str) -> str:
        decomposed = unicodedata.normalize("NFD", text.lower())
        return "".join(ch for ch in decomposed if not unicodedata.combining(ch)).strip()

    table = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = shlex.split(line)
        if tokens[0] != "define" or len(tokens) != 3:
            raise ConfigError(f"definitions line {lineno}: expected define \"subject\" \"text\"")
        table[fold(tokens[1])] = tokens[2]
    return table


@dataclass
class Runtime:
    """Everything a session needs, assembled once and shared read-only."""

    config: RuntimeConfig
    registry: PredicateRegistry
    library: PlanLibrary
    terminology: Terminology
    store: DocumentStore
    definitions: dict
    templates: TemplateTable
    lexicon: MarkerLexicon
    patterns: CuePatterns

    def make_engine(self, trace_hook=None) -> Engine:
        return Engine(
            registry=self.registry,
            library=self.library,
            terminology=self.terminology,
            store=self.store,
            definitions=self.definitions,
            too_many_threshold=self.config.too_many_threshold,
            trace_hook=trace_hook,
        )

    def make_interpreter(self) -> Interpreter:
        return Interpreter(self.registry, self.terminology, self.lexicon, self.patterns)

    def make_generator(self) -> Generator:
        return Generator(self.templates, self.registry, self.terminology)


def build_runtime(config: Optional[RuntimeConfig] = None) -> Runtime:
    config = config or RuntimeConfig()
    registry = load_registry(_read("predicates", config.predicates, config.language))
    library = load_plans(_read("plans", config.plans, config.language), registry)
    terminology = load_terminology(_read("terminology", config.terminology, config.language))
    store = load_documents(_read("corpus", config.corpus, config.language), terminology)
    definitions = load_definitions(_read("definitions", config.definitions, config.language))
    templates = TemplateTable.parse(
        _read("templates", config.templates, config.language), config.language
    )
    lexicon = MarkerLexicon.parse(_read("lexicon", config.lexicon, config.language))
    patterns = CuePatterns.parse(_read("patterns", config.patterns, config.language))
    return Runtime(
        config=config,
        registry=registry,
        library=library,
        terminology=terminology,
        store=store,
        definitions=definitions,
        templates=templates,
        lexicon=lexicon,
        patterns=patterns,
    )
