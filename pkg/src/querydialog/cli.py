"""Command line entry points: repl, replay, serve."""

from __future__ import annotations

import argparse
import sys

from .config import RuntimeConfig, build_runtime
from .session import DialogueSession, replay


def _add_path_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--terminology", help="terminology file path")
    parser.add_argument("--corpus", help="document corpus file path")
    parser.add_argument("--plans", help="plan library file path")
    parser.add_argument("--templates", help="template table file path")
    parser.add_argument("--lexicon", help="marker lexicon file path")
    parser.add_argument("--patterns", help="cue pattern file path")
    parser.add_argument("--predicates", help="predicate registry file path")
    parser.add_argument("--definitions", help="term definitions file path")
    parser.add_argument("--lang", default="fr", choices=["fr", "en"], help="bundled fixture language")
    parser.add_argument("--too-many", type=int, default=10, help="too-many result threshold")


def _config_from(args: argparse.Namespace, transcript_dir=None) -> RuntimeConfig:
    return RuntimeConfig(
        predicates=args.predicates,
        plans=args.plans,
        terminology=args.terminology,
        corpus=args.corpus,
        definitions=args.definitions,
        templates=args.templates,
        lexicon=args.lexicon,
        patterns=args.patterns,
        language=args.lang,
        too_many_threshold=args.too_many,
        transcript_dir=transcript_dir,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="querydialog", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    repl_parser = sub.add_parser("repl", help="interactive text session")
    _add_path_flags(repl_parser)
    repl_parser.add_argument("--transcripts", help="directory for transcript persistence")

    replay_parser = sub.add_parser("replay", help="replay a script and diff the output")
    _add_path_flags(replay_parser)
    replay_parser.add_argument("script", help="script file of S:/U: lines")

    serve_parser = sub.add_parser("serve", help="run the HTTP session service")
    _add_path_flags(serve_parser)
    serve_parser.add_argument("--port", type=int, default=8000)
    serve_parser.add_argument("--host", default="127.0.0.1")
    serve_parser.add_argument("--transcripts", help="directory for transcript persistence")

    args = parser.parse_args(argv)

    if args.command == "repl":
        runtime = build_runtime(_config_from(args, getattr(args, "transcripts", None)))
        session = DialogueSession(runtime, transcript_dir=getattr(args, "transcripts", None))
        print(session.start().text)
        try:
            while True:
                line = input("> ")
                turn = session.submit(line)
                print(turn.text)
                if session.state.closed:
                    break
        except (EOFError, KeyboardInterrupt):
            print()
        return 0

    if args.command == "replay":
        runtime = build_runtime(_config_from(args))
        with open(args.script, encoding="utf-8") as handle:
            script = handle.read()
        report = replay(runtime, script)
        for entry in report.transcript:
            prefix = "S" if entry["speaker"] == "system" else "U"
            print(f"{prefix}: {entry['text']}")
        if report.passed:
            print("replay: PASS")
            return 0
        print(report.diff_text(), file=sys.stderr)
        print("replay: FAIL", file=sys.stderr)
        return 1

    if args.command == "serve":
        import uvicorn

        from .service import create_app

        runtime = build_runtime(_config_from(args, getattr(args, "transcripts", None)))
        app = create_app(runtime, transcript_dir=getattr(args, "transcripts", None))
        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
