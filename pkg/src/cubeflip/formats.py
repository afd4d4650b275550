"""Line-oriented text formats for configurations, triangulations, flip paths,
checkpoints and reports."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, TextIO

from .kernel import CUBE3, CUBE4, Config


class FormatError(ValueError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        where = f"{path or '<input>'}:{line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


def _lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


# -- configurations ------------------------------------------------------


def preset(name: str) -> Config:
    from .contraction import s_config

    key = name.lower()
    if key == "cube4":
        return CUBE4
    if key == "cube3":
        return CUBE3
    if key in ("s1", "s2", "s3"):
        return s_config(int(key[1]))
    raise KeyError(name)


PRESETS = ("cube3", "cube4", "S1", "S2", "S3")


def format_config(cfg: Config) -> str:
    out = [f"dim {cfg.ambient_dim} points {len(cfg)}"]
    for lab, p in zip(cfg.labels, cfg.coords):
        out.append(lab + " " + " ".join(f"{v.numerator}/{v.denominator}" for v in p))
    return "\n".join(out) + "\n"


def parse_config(text: str, path: str | None = None, name: str = "") -> Config:
    rows = list(_lines(text))
    if not rows:
        raise FormatError("empty configuration", path, 1)
    no, head = rows[0]
    if len(head) != 4 or head[0] != "dim" or head[2] != "points":
        raise FormatError("expected 'dim <d> points <n>'", path, no)
    try:
        d, n = int(head[1]), int(head[3])
    except ValueError:
        raise FormatError("dimension and point count must be integers", path, no) from None
    if len(rows) - 1 != n:
        raise FormatError(f"header announces {n} points, found {len(rows) - 1}", path, no)
    labels, pts = [], []
    for no, toks in rows[1:]:
        if len(toks) != d + 1:
            raise FormatError(f"expected a label and {d} coordinates", path, no)
        try:
            pts.append(tuple(Fraction(t) for t in toks[1:]))
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"bad coordinate in {' '.join(toks[1:])!r}", path, no) from None
        labels.append(toks[0])
    try:
        return Config(tuple(labels), tuple(pts), name or (os.path.basename(path) if path else ""))
    except ValueError as exc:
        raise FormatError(str(exc), path) from None


def load_config(spec: str) -> Config:
    """A preset name or a configuration file path."""
    try:
        return preset(spec)
    except KeyError:
        pass
    if not os.path.exists(spec):
        raise FormatError(f"no preset or file named {spec!r}")
    with open(spec) as fh:
        return parse_config(fh.read(), spec)


# -- triangulations --------------------------------------------------------


def _config_name(cfg: Config) -> str:
    for name in PRESETS:
        if preset(name) == cfg:
            return name
    return cfg.name or "?"


def _face_line(cfg: Config, mask: int) -> str:
    return " ".join(cfg.names(mask))


def format_triangulation(T) -> str:
    cfg = T.cfg
    lines = [f"config {_config_name(cfg)}"]
    lines += sorted(_face_line(cfg, c) for c in T.cells)
    return "\n".join(lines) + "\n"


def _parse_face(cfg: Config, toks: list[str], path, no) -> int:
    mask = 0
    for t in toks:
        if t not in cfg.index:
            raise FormatError(f"unknown label {t!r}", path, no)
        mask |= 1 << cfg.index[t]
    return mask


def parse_triangulation(text: str, cfg: Config | None = None, path: str | None = None):
    from .complex import Triangulation

    cells = []
    for no, toks in _lines(text):
        if toks[0] == "config":
            if len(toks) != 2:
                raise FormatError("expected 'config <name>'", path, no)
            named = load_config(toks[1])
            if cfg is not None and cfg != named:
                raise FormatError("configuration differs from the one requested", path, no)
            cfg = named
            continue
        if cfg is None:
            raise FormatError("no configuration given before the first face", path, no)
        cells.append(_parse_face(cfg, toks, path, no))
    if cfg is None:
        raise FormatError("empty triangulation file", path, 1)
    return Triangulation(cfg, tuple(cells))


def load_triangulation(path: str, cfg: Config | None = None):
    with open(path) as fh:
        return parse_triangulation(fh.read(), cfg, path)


# -- flip paths ----------------------------------------------------------


def format_path(path) -> str:
    cfg = path.start.cfg
    out = [f"config {_config_name(cfg)}", "start"]
    out += sorted(_face_line(cfg, c) for c in path.start.cells)
    out.append("end")
    for m in path.moves:
        out.append(f"flip {_face_line(cfg, m.circuit.support)} remove {_face_line(cfg, m.removed)}")
    return "\n".join(out) + "\n"


def parse_path(text: str, path: str | None = None):
    """Returns (start triangulation, [(support, removed side)])."""
    from .complex import Triangulation

    cfg = None
    cells: list[int] = []
    moves = []
    state = "head"
    for no, toks in _lines(text):
        if state == "head":
            if toks[0] == "config" and len(toks) == 2:
                cfg = load_config(toks[1])
            elif toks == ["start"]:
                if cfg is None:
                    raise FormatError("missing config line", path, no)
                state = "start"
            else:
                raise FormatError("expected 'config' or 'start'", path, no)
        elif state == "start":
            if toks == ["end"]:
                state = "moves"
            else:
                cells.append(_parse_face(cfg, toks, path, no))
        else:
            if toks[0] != "flip" or "remove" not in toks:
                raise FormatError("expected 'flip <labels> remove <labels>'", path, no)
            k = toks.index("remove")
            moves.append((_parse_face(cfg, toks[1:k], path, no), _parse_face(cfg, toks[k + 1 :], path, no)))
    if state != "moves":
        raise FormatError("unterminated start block", path)
    return Triangulation(cfg, tuple(cells)), moves


# -- checkpoints ---------------------------------------------------------


@dataclass
class Checkpoint:
    config_hash: str
    group_hash: str
    level: int
    total: int
    flips: int
    max_frontier: int
    visited: list[bytes]
    frontier: list[bytes]


def write_checkpoint(path, cp: Checkpoint) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write("cubeflip-checkpoint 1\n")
        fh.write(f"config {cp.config_hash}\n")
        fh.write(f"group {cp.group_hash}\n")
        fh.write(f"level {cp.level}\n")
        fh.write(f"total {cp.total}\n")
        fh.write(f"flips {cp.flips}\n")
        fh.write(f"max_frontier {cp.max_frontier}\n")
        fh.write(f"visited {len(cp.visited)}\n")
        for f in sorted(cp.visited):
            fh.write(f.hex() + "\n")
        fh.write(f"frontier {len(cp.frontier)}\n")
        for f in sorted(cp.frontier):
            fh.write(f.hex() + "\n")
    os.replace(tmp, path)


def read_checkpoint(path) -> Checkpoint:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "cubeflip-checkpoint 1":
        raise FormatError("not a checkpoint file", str(path), 1)
    head = {}
    i = 1
    for key in ("config", "group", "level", "total", "flips", "max_frontier"):
        parts = lines[i].split()
        if len(parts) != 2 or parts[0] != key:
            raise FormatError(f"expected '{key} <value>'", str(path), i + 1)
        head[key] = parts[1]
        i += 1

    def block(name):
        nonlocal i
        parts = lines[i].split()
        if len(parts) != 2 or parts[0] != name:
            raise FormatError(f"expected '{name} <count>'", str(path), i + 1)
        k = int(parts[1])
        out = [bytes.fromhex(s) for s in lines[i + 1 : i + 1 + k]]
        if len(out) != k:
            raise FormatError(f"truncated {name} block", str(path), i + 1)
        i += 1 + k
        return out

    visited = block("visited")
    frontier = block("frontier")
    return Checkpoint(head["config"], head["group"], int(head["level"]), int(head["total"]),
                      int(head["flips"]), int(head["max_frontier"]), visited, frontier)


# -- reports ---------------------------------------------------------------


def format_report(values: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in values.items())


def write_report(out: TextIO, values: dict) -> None:
    out.write(format_report(values))
