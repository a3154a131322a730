"""Batch command line: print reduction traces, export provenance links,
emit morph animation frames.

Exit codes: 0 when the trace reached a fixpoint, 2 when it was cut off
by the step budget, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .morph import Morph, morph_draw
from .reducer import (EvalError, EvaluationContext, LoadError, ReductionTrace,
                      load_prelude, node_path)
from .render import render_static, style_named
from .syntax import ParseError, parse, parse_all, write

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TRUNCATED = 2

FRAME_SEPARATOR = "\x0c"


def _add_common(sub: argparse.ArgumentParser) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("-e", "--expression", metavar="EXPR",
                       help="expression text to reduce")
    group.add_argument("-f", "--file", metavar="FILE",
                       help="file holding the expression")
    sub.add_argument("-p", "--prelude", metavar="FILE",
                     help="file of define forms loaded first")
    sub.add_argument("--max-steps", type=int, default=1000, metavar="N",
                     help="step budget before giving up (default 1000)")
    sub.add_argument("--style", choices=["unicode", "ascii"],
                     default="unicode", help="box drawing glyph set")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxstep",
        description="Step-by-step reduction of a small Scheme subset, "
                    "with box-notation rendering and morph animation.")
    commands = parser.add_subparsers(dest="command", required=True)

    steps = commands.add_parser(
        "steps", help="print every reduction snapshot")
    _add_common(steps)
    steps.add_argument("--render", action="store_true",
                       help="draw each snapshot in box notation")

    provenance = commands.add_parser(
        "provenance", help="print each step's child-to-parents links as JSON")
    _add_common(provenance)

    frames = commands.add_parser(
        "frames", help="emit animation frames for every reduction step")
    _add_common(frames)
    frames.add_argument("--fps", type=int, default=30, metavar="N",
                        help="frames per second (default 30)")
    frames.add_argument("--duration-ms", type=int, default=700, metavar="MS",
                        help="morph duration per step (default 700)")
    frames.add_argument("-o", "--output", metavar="DIR",
                        help="write one file per frame instead of a stream")
    return parser


def _read_source(args) -> str:
    if args.expression is not None:
        return args.expression
    return Path(args.file).read_text()


def _build_trace(args) -> ReductionTrace:
    # Divergent terms nest one level deeper per step, and the tree walks
    # downstream (printing, layout) recurse per level.  Grant headroom for
    # the configured trace length, but stay far below the depth where the
    # interpreter would exhaust the C stack instead of raising.
    needed = 2000 + 2 * args.max_steps
    sys.setrecursionlimit(max(sys.getrecursionlimit(), min(needed, 6000)))
    context = EvaluationContext()
    if args.prelude:
        load_prelude(context, parse_all(Path(args.prelude).read_text()))
    expression = parse(_read_source(args))
    return ReductionTrace(expression, context, max_steps=args.max_steps)


def _finish(trace: ReductionTrace, out) -> int:
    if trace.truncated:
        print(f"gave up after {trace.last_index} steps without a fixpoint",
              file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_steps(args, out) -> int:
    trace = _build_trace(args)
    trace.run()
    style = style_named(args.style)
    blocks = []
    for snap in trace.snapshots:
        if args.render:
            blocks.append(render_static(snap.expr, style).to_text())
        else:
            blocks.append(write(snap.expr))
    out.write("\n\n".join(blocks) + "\n")
    return _finish(trace, out)


def step_links(trace: ReductionTrace, index: int) -> list[dict]:
    """Child-to-parents links of snapshot index, as child-index paths.
    Default self-links are not stored, so they never appear; parents
    that are not part of the previous snapshot are dropped."""
    snap = trace.snapshots[index]
    previous = trace.snapshots[index - 1].expr
    links = []
    for child, parents in snap.origin.items():
        child_path = node_path(snap.expr, child)
        if child_path is None:
            continue
        parent_paths = []
        for parent in parents:
            path = node_path(previous, parent)
            if path is not None:
                parent_paths.append(path)
        links.append({"child": child_path, "parents": parent_paths})
    links.sort(key=lambda link: link["child"])
    return links


def cmd_provenance(args, out) -> int:
    trace = _build_trace(args)
    trace.run()
    payload = [{"step": k, "links": step_links(trace, k)}
               for k in range(1, trace.last_index + 1)]
    out.write(json.dumps(payload, indent=2) + "\n")
    return _finish(trace, out)


def frame_count(duration_ms: int, fps: int) -> int:
    return math.ceil(duration_ms * fps / 1000) + 1


def cmd_frames(args, out) -> int:
    if args.fps < 1:
        print("fps must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    if args.duration_ms < 1:
        print("duration must be at least 1 ms", file=sys.stderr)
        return EXIT_ERROR
    trace = _build_trace(args)
    trace.run()
    style = style_named(args.style)
    count = frame_count(args.duration_ms, args.fps)
    directory = Path(args.output) if args.output else None
    if directory is not None:
        directory.mkdir(parents=True, exist_ok=True)
    frames = []
    for k in range(1, trace.last_index + 1):
        snap = trace.snapshots[k]
        morph = Morph(trace.snapshots[k - 1].expr, snap.expr,
                      snap.origin, snap.progeny)
        for i in range(count):
            morph.set_progress(i / (count - 1))
            text = morph_draw(morph, style=style).to_attributed()
            if directory is not None:
                name = f"step{k:03d}_frame{i:03d}.txt"
                (directory / name).write_text(text + "\n")
            else:
                frames.append(text)
    if directory is None and frames:
        out.write(("\n" + FRAME_SEPARATOR + "\n").join(frames) + "\n")
    return _finish(trace, out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return EXIT_OK if stop.code == 0 else EXIT_ERROR
    if args.max_steps < 0:
        print("max-steps must not be negative", file=sys.stderr)
        return EXIT_ERROR
    handlers = {
        "steps": cmd_steps,
        "provenance": cmd_provenance,
        "frames": cmd_frames,
    }
    try:
        return handlers[args.command](args, sys.stdout)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_ERROR
    except LoadError as err:
        print(f"prelude error: {err}", file=sys.stderr)
        return EXIT_ERROR
    except EvalError as err:
        step = f" at step {err.step}" if err.step is not None else ""
        print(f"evaluation error{step}: {err}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as err:
        print(f"cannot read input: {err}", file=sys.stderr)
        return EXIT_ERROR
    except RecursionError:
        print("expression nests too deeply to process", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
