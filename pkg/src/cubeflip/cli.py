"""Command-line interface: ``cubeflip <command> ...``.

Every command ends its output with a block of ``KEY=VALUE`` lines.
Exit codes: 0 success, 1 verification mismatch, 2 input error,
3 an internal consistency check of the connectivity driver failed.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
from fractions import Fraction
from typing import Sequence

from . import formats
from .complex import ComplexError, ValidationError, validate
from .kernel import KernelError, circuits_through

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_PARADOX = 0, 1, 2, 3


class InputError(Exception):
    pass


def _report(out, values: dict) -> None:
    formats.write_report(out, values)


# -- circuits ----------------------------------------------------------------


def cmd_circuits(args, out) -> int:
    cfg = formats.load_config(args.config)
    if args.through:
        if args.through not in cfg.index:
            raise InputError(f"unknown label {args.through!r}")
        circ = circuits_through(cfg, args.through)
    else:
        circ = cfg.circuits
    for z in circ:
        out.write(f"{cfg.fmt(z.support)} | {cfg.fmt(z.neg)} / {cfg.fmt(z.pos)}\n")
    _report(out, {"config": formats._config_name(cfg), "circuits": len(circ)})
    return EXIT_OK


# -- enumerate ---------------------------------------------------------------


def cmd_enumerate(args, out) -> int:
    from .enumeration import enumerate_all_triangulations, explore_flip_graph
    from .symmetry import automorphisms, canonical_form

    cfg = formats.load_config(args.config)

    def progress(level, classes, total):
        if args.verbose:
            print(f"level {level}: {classes} nodes, total {total}", file=sys.stderr, flush=True)

    rep = explore_flip_graph(
        cfg,
        mod_symmetry=args.mod_symmetry,
        checkpoint=args.checkpoint,
        workers=args.workers,
        engine=args.engine,
        max_levels=args.max_levels,
        checkpoint_every=args.checkpoint_every,
        collect=args.oracle and not args.mod_symmetry,
        progress=progress,
    )
    values = {
        "config": formats._config_name(cfg),
        "triangulations": rep.total_triangulations,
        "classes": rep.symmetry_classes if rep.symmetry_classes is not None else "unknown",
        "total": rep.total_triangulations,
        "flips": rep.flips_traversed,
        "levels": rep.levels,
        "complete": int(rep.complete),
    }
    code = EXIT_OK
    if args.oracle:
        trias = enumerate_all_triangulations(cfg, force=args.force)
        if args.mod_symmetry:
            G = automorphisms(cfg)
            oracle_classes = len({canonical_form(T, G) for T in trias})
            agree = oracle_classes == rep.symmetry_classes and len(trias) == rep.total_triangulations
        else:
            agree = set(rep.forms) == {canonical_form(T, ()) for T in trias}
        values["oracle"] = len(trias)
        values["oracle_agrees"] = int(agree)
        if not agree:
            code = EXIT_MISMATCH
    _report(out, values)
    return code


# -- prop5 -------------------------------------------------------------------

DEFAULT_EXPECTED = {1: {"U0", "U1-", "U1+"}, 2: {"U0", "U1-", "U1+"}, 3: {"U0"}}


def parse_expected(text: str, path: str | None = None) -> dict[int, set[str]]:
    exp: dict[int, set[str]] = {}
    for no, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if toks[0] not in ("S1", "S2", "S3"):
            raise formats.FormatError("expected 'S<q> <names>'", path, no)
        exp[int(toks[0][1])] = set(toks[1:])
    return exp


def name_link(T, ctx) -> str:
    """U0, U1-, U1+ or a brace list of the cells of a contracted link."""
    from .driver import U1_MINUS, U1_PLUS

    cells = {frozenset(ctx.source.names(ctx.to_source(c))) for c in T.cells}
    for name, tets in (("U1-", U1_MINUS), ("U1+", U1_PLUS)):
        if cells == {frozenset(t) for t in tets}:
            return name
    if len(cells) == 1 and cells == {frozenset("bcei")}:
        return "U0"
    return "{" + " ".join(sorted(ctx.fmt(c) for c in T.cells)) + "}"


def _braced(names) -> str:
    order = {"U0": 0, "U1-": 1, "U1+": 2}
    return "{" + ",".join(sorted(names, key=lambda s: (order.get(s, 3), s))) + "}"


def cmd_prop5(args, out) -> int:
    from .contraction import s_context
    from .enumeration import reduction_free_links, flip_graph_triangulations

    expected = DEFAULT_EXPECTED
    if args.expected:
        with open(args.expected) as fh:
            expected = parse_expected(fh.read(), args.expected)
    code = EXIT_OK
    values = {}
    shown = False
    for q in (1, 2, 3):
        ctx = s_context(q)
        trias = flip_graph_triangulations(ctx.target)
        L = reduction_free_links("a", ctx, trias, args.quantifier)
        names = {name_link(T, ctx) for T in L}
        ok = names == expected.get(q, set())
        out.write(f"L_a(S{q})={_braced(names)} {'OK' if ok else 'MISMATCH'}\n")
        if not ok:
            out.write(f"  expected {_braced(expected.get(q, set()))}\n")
            code = EXIT_MISMATCH
        if not shown:
            for T in L:
                if name_link(T, ctx) == "U1-":
                    out.write("U1- cells: " + ", ".join(sorted(ctx.fmt(c) for c in T.cells)) + "\n")
                    shown = True
        values[f"S{q}_triangulations"] = len(trias)
        values[f"S{q}_L"] = len(L)
    values["quantifier"] = args.quantifier
    values["status"] = "OK" if code == EXIT_OK else "MISMATCH"
    _report(out, values)
    return code


# -- connect -----------------------------------------------------------------


def cmd_connect(args, out) -> int:
    from .driver import FlipPath, flip_to_corner_cut
    from .flips import is_flippable
    from .complex import is_corner_cut
    from .kernel import radon_partition

    T = formats.load_triangulation(args.triangulation)
    validate(T)
    path = flip_to_corner_cut(T)
    target = args.out or (os.path.splitext(args.triangulation)[0] + ".path")
    with open(target, "w") as fh:
        fh.write(formats.format_path(path))
    with open(target) as fh:
        start, moves = formats.parse_path(fh.read(), target)
    replayed = FlipPath(start)
    for support, removed in moves:
        z = radon_partition(support, start.cfg)
        m = is_flippable(replayed.end, z, removed)
        if m is None:
            out.write(f"replay failed at {start.cfg.fmt(support)}\n")
            _report(out, {"path_length": len(moves), "replay": "FAILED"})
            return EXIT_MISMATCH
        replayed.push(m)
    replayed.end = replayed.replay(check=True)
    cc = is_corner_cut(replayed.end)
    out.write(f"path length {len(path)}\n")
    ok = cc is not None and replayed.end == path.end
    _report(out, {
        "path_length": len(path),
        "path_file": target,
        "corner_cut": f"{cc[0].name}:{''.join(start.cfg.names(cc[1]))}" if cc else "none",
        "replay": "OK" if ok else "FAILED",
    })
    return EXIT_OK if ok else EXIT_MISMATCH


# -- regularity --------------------------------------------------------------


def parse_certificate(text: str, cfg, path: str | None = None) -> dict[str, Fraction]:
    w = {}
    for no, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if len(toks) != 2 or toks[0] not in cfg.index:
            raise formats.FormatError("expected '<label> <height>'", path, no)
        try:
            w[toks[0]] = Fraction(toks[1])
        except (ValueError, ZeroDivisionError):
            raise formats.FormatError(f"bad height {toks[1]!r}", path, no) from None
    missing = [lab for lab in cfg.labels if lab not in w]
    if missing:
        raise formats.FormatError(f"no height for {' '.join(missing)}", path)
    return w


def format_certificate(w: dict[str, Fraction]) -> str:
    return "".join(f"{lab} {v}\n" for lab, v in w.items())


def cmd_regularity(args, out) -> int:
    from .enumeration import flip_graph_triangulations
    from .regularity import is_regular, verify_certificate

    if args.all:
        cfg = formats.load_config(args.target)
        trias = flip_graph_triangulations(cfg)
        n_reg = sum(1 for T in trias if is_regular(T) is not None)
        out.write(f"{n_reg}/{len(trias)} regular\n")
        _report(out, {"config": formats._config_name(cfg), "triangulations": len(trias), "regular": n_reg})
        return EXIT_OK

    T = formats.load_triangulation(args.target)
    validate(T)
    if args.certificate:
        with open(args.certificate) as fh:
            w = parse_certificate(fh.read(), T.cfg, args.certificate)
        ok = verify_certificate(T, w)
        out.write("certificate OK\n" if ok else "certificate REJECTED\n")
        _report(out, {"certificate": "OK" if ok else "REJECTED"})
        return EXIT_OK if ok else EXIT_MISMATCH
    w = is_regular(T)
    if w is None:
        out.write("non-regular (LP infeasible)\n")
        _report(out, {"regular": 0})
        return EXIT_OK
    out.write("regular\n")
    if args.write_certificate:
        with open(args.write_certificate, "w") as fh:
            fh.write(format_certificate(w))
    _report(out, {"regular": 1})
    return EXIT_OK


# -- config / walk -------------------------------------------------------------


def cmd_config(args, out) -> int:
    cfg = formats.load_config(args.name)
    out.write(formats.format_config(cfg))
    _report(out, {"config": formats._config_name(cfg), "points": len(cfg), "dim": cfg.affine_dim})
    return EXIT_OK


def cmd_walk(args, out) -> int:
    from .complex import corner_cut_triangulations, placing_triangulation
    from .driver import random_walk

    rng = random.Random(args.seed)
    if os.path.exists(args.start):
        T = formats.load_triangulation(args.start)
    else:
        cfg = formats.load_config(args.start)
        if args.start.lower() == "cube4":
            T = sorted(corner_cut_triangulations(), key=lambda t: t.cells)[0]
        else:
            T = placing_triangulation(cfg)
    validate(T)
    path = random_walk(T, args.steps, rng)
    text = formats.format_triangulation(path.end)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    _report(out, {"steps": len(path), "cells": len(path.end.cells)})
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubeflip", description="Triangulations and flips of the 4-cube.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("circuits", help="list circuits with their Radon partitions")
    c.add_argument("config")
    c.add_argument("--through", metavar="LABEL")
    c.set_defaults(func=cmd_circuits)

    e = sub.add_parser("enumerate", help="explore the flip-graph")
    e.add_argument("config")
    e.add_argument("--mod-symmetry", action="store_true")
    e.add_argument("--checkpoint", metavar="FILE")
    e.add_argument("--checkpoint-every", type=float, default=0.0, metavar="SECONDS")
    e.add_argument("--oracle", action="store_true", help="cross-check with exhaustive enumeration")
    e.add_argument("--force", action="store_true", help="allow the oracle on large configurations")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--engine", choices=("auto", "python", "numba"), default="auto")
    e.add_argument("--max-levels", type=int)
    e.set_defaults(func=cmd_enumerate)

    q = sub.add_parser("prop5", help="triangulations of S1, S2, S3 with no apex-reducing flip")
    q.add_argument("--expected", metavar="FILE")
    q.add_argument("--quantifier", choices=("contracted", "native"), default="contracted")
    q.set_defaults(func=cmd_prop5)

    k = sub.add_parser("connect", help="flip path to a corner-cut triangulation")
    k.add_argument("triangulation")
    k.add_argument("--out", metavar="FILE")
    k.set_defaults(func=cmd_connect)

    r = sub.add_parser("regularity", help="verify or decide regularity")
    r.add_argument("target", help="triangulation file, or a configuration with --all")
    r.add_argument("--certificate", metavar="FILE")
    r.add_argument("--write-certificate", metavar="FILE")
    r.add_argument("--all", action="store_true")
    r.set_defaults(func=cmd_regularity)

    g = sub.add_parser("config", help="configuration utilities")
    gsub = g.add_subparsers(dest="action", required=True)
    d = gsub.add_parser("dump")
    d.add_argument("name")
    d.set_defaults(func=cmd_config)

    w = sub.add_parser("walk", help="random flip walk")
    w.add_argument("start", help="triangulation file or configuration")
    w.add_argument("--steps", type=int, default=200)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--out", metavar="FILE")
    w.set_defaults(func=cmd_walk)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    from .driver import ParadoxError
    from .enumeration import EnumerationError

    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args, out)
    except ParadoxError as exc:
        print(f"error: consistency check failed: {exc}", file=sys.stderr)
        _report(out, {"error": "paradox"})
        return EXIT_PARADOX
    except ValidationError as exc:
        print(f"error: invalid triangulation: {exc}", file=sys.stderr)
        _report(out, {"error": "invalid", "kind": exc.kind})
        return EXIT_INPUT
    except (formats.FormatError, InputError, KernelError, ComplexError, EnumerationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _report(out, {"error": "input"})
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
