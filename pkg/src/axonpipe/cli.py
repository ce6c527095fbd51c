"""Command-line entry points: axon new|open|run|render|serve."""

from __future__ import annotations

import argparse
import sys

from . import persist
from .errors import KernelError
from .model import Scheme, integrity_check
from .script import ScriptError, Session, run_script


def _load_session(path: str | None) -> Session:
    session = Session()
    if path:
        session.scheme = persist.load(path)
    return session


def cmd_new(args) -> int:
    persist.save(Scheme(), args.file)
    print(f"created empty scheme {args.file}")
    return 0


def cmd_open(args) -> int:
    scheme = persist.load(args.file)
    problems = integrity_check(scheme)
    counts = {kind: len(store) for kind, store in scheme.stores() if store}
    print(f"{args.file}: " + (", ".join(f"{n} {k}s" for k, n in counts.items())
                              or "empty"))
    for v in problems:
        print(f"  integrity: {v!r}")
    return 1 if problems else 0


def cmd_run(args) -> int:
    session = _load_session(args.scheme)
    if args.library:
        from .script import invoke
        invoke(session, "library", ["load", args.library], {})
    try:
        transcript = run_script(session, args.script)
    except ScriptError as exc:
        for entry in exc.transcript:
            print(f"{entry['line']:4d}  {entry['verb']}: {entry['result']}")
        print(f"error at line {exc.line}: {exc.cause}", file=sys.stderr)
        return 1
    for entry in transcript:
        print(f"{entry['line']:4d}  {entry['verb']}: {entry['result']}")
    if args.save:
        persist.save(session.scheme, args.save)
        print(f"saved {args.save}")
    return 0


def cmd_render(args) -> int:
    session = _load_session(args.file)
    if args.library:
        from .script import invoke
        invoke(session, "library", ["load", args.library], {})
    from .script import render_svg_bytes
    data = render_svg_bytes(session, args.projection, args.glyph)
    with open(args.output, "wb") as fh:
        fh.write(data)
    print(f"wrote {args.output} ({len(data)} bytes)")
    return 0


def cmd_serve(args) -> int:
    from .service import serve
    session = _load_session(args.scheme)
    if args.library:
        from .script import invoke
        invoke(session, "library", ["load", args.library], {})
    print(f"serving on http://127.0.0.1:{args.port}")
    serve(session, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="axon",
        description="Axonometric pipeline scheme kernel")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("new", help="create an empty scheme file")
    p.add_argument("file")
    p.set_defaults(func=cmd_new)

    p = sub.add_parser("open", help="load a scheme and report its contents")
    p.add_argument("file")
    p.set_defaults(func=cmd_open)

    p = sub.add_parser("run", help="run a command script")
    p.add_argument("script")
    p.add_argument("--scheme", help="scheme file to start from")
    p.add_argument("--save", help="save the result here")
    p.add_argument("--library", help="symbol library to load first")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("render", help="render a scheme file to SVG")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--projection", help="projection preset name")
    p.add_argument("--glyph", action="store_true",
                   help="include the axes-direction glyph")
    p.add_argument("--library", help="symbol library for block geometry")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--scheme", help="scheme file to open")
    p.add_argument("--library", help="symbol library to load")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KernelError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
