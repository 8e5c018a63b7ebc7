"""``contactlab run <scene> --out <dir>``.

Exit status is 0 when every task passes, 1 when any task fails and 2 when the
scene cannot be parsed or resolved. Options resolve as command line, then
``CONTACTLAB_*`` environment variables, then scene globals, then defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from ..errors import SceneError
from .scene import parse_number, parse_scene
from .tasks import Options, Workspace, run_task

ENV = {"seed": ("CONTACTLAB_SEED", int), "samples": ("CONTACTLAB_SAMPLES", int), "tol": ("CONTACTLAB_TOL", float)}


def resolve_options(scene, args, environ=None) -> Options:
    environ = os.environ if environ is None else environ
    opts = Options()
    for key, (var, kind) in ENV.items():
        value = getattr(opts, key)
        if key in scene.globals:
            value = parse_number(scene.globals[key], kind)
        if environ.get(var):
            try:
                value = kind(environ[var])
            except ValueError:
                raise SceneError(f"{var} must be {'an integer' if kind is int else 'a number'}") from None
        if getattr(args, key, None) is not None:
            value = getattr(args, key)
        setattr(opts, key, value)
    return opts


def task_names(scene):
    """Report names: explicit ``name = ...`` or ``<kind>-<index>``, made unique."""
    names, seen = [], set()
    for i, sec in enumerate(scene.of_kind("task"), start=1):
        base = sec.value("name", f"{sec.name}-{i}")
        name, k = base, 2
        while name in seen:
            name, k = f"{base}-{k}", k + 1
        seen.add(name)
        names.append(name)
    return names


def run(path, out, args=None, stream=None, environ=None) -> int:
    args = args or argparse.Namespace()
    stream = sys.stdout if stream is None else stream
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"{path}: {exc.strerror}", file=sys.stderr)
        return 2
    try:
        scene = parse_scene(text, str(path))
        opts = resolve_options(scene, args, environ)
        ws = Workspace(scene, opts)
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        summary = []
        for sec, name in zip(scene.of_kind("task"), task_names(scene)):
            result = run_task(ws, sec, opts, name)
            (out / f"{name}.txt").write_text(result.report(), encoding="utf-8")
            for fname, content in result.files.items():
                (out / fname).write_text(content, encoding="utf-8")
            print(result.summary(), file=stream)
            summary.append(result)
    except SceneError as exc:
        line = exc.line if exc.line is not None else 1
        col = exc.column if exc.column is not None else 1
        msg = str(exc).split(": ", 1)[1] if exc.line is not None else str(exc)
        print(f"{path}:{line}:{col}: {msg}", file=sys.stderr)
        return 2
    (out / "summary.txt").write_text("".join(r.summary() + "\n" for r in summary), encoding="utf-8")
    return 0 if all(r.passed for r in summary) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="contactlab", description="Run contact geometry verification scenes.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run every task in a scene file")
    r.add_argument("scene")
    r.add_argument("--out", default="out", help="directory for reports (default: out)")
    r.add_argument("--seed", type=int)
    r.add_argument("--samples", type=int)
    r.add_argument("--tol", type=float)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.scene, args.out, args)


if __name__ == "__main__":
    sys.exit(main())
