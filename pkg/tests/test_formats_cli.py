import io
import random
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeflip import formats
from cubeflip.cli import format_certificate, main, parse_certificate, parse_expected
from cubeflip.complex import Triangulation, is_corner_cut, make_corner_cut
from cubeflip.driver import random_walk
from cubeflip.kernel import CUBE3, CUBE4
from cubeflip.regularity import corner_cut_heights

FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def report(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line and " " not in line.split("=")[0])


# -- formats -------------------------------------------------------------------


@pytest.mark.parametrize("name", formats.PRESETS)
def test_config_round_trip(name):
    cfg = formats.preset(name)
    back = formats.parse_config(formats.format_config(cfg))
    assert back.labels == cfg.labels and back.coords == cfg.coords


@given(st.integers(0, 2**32 - 1), st.integers(0, 25))
def test_triangulation_and_path_round_trip(seed, steps):
    rng = random.Random(seed)
    path = random_walk(make_corner_cut("E", "ap"), steps, rng)
    T = path.end
    text = formats.format_triangulation(T)
    assert formats.parse_triangulation(text) == T
    assert formats.format_triangulation(formats.parse_triangulation(text)) == text
    start, moves = formats.parse_path(formats.format_path(path))
    assert start == path.start
    assert moves == [(m.circuit.support, m.removed) for m in path.moves]


def test_checkpoint_round_trip(tmp_path):
    cp = formats.Checkpoint("c" * 8, "g" * 8, 3, 100, 40, 12, [b"\x00\x01", b"\xff"], [b"\x02"])
    p = tmp_path / "x.cp"
    formats.write_checkpoint(p, cp)
    assert formats.read_checkpoint(p) == cp
    p.write_text(p.read_text().replace("frontier 1", "frontier 3"))
    with pytest.raises(formats.FormatError):
        formats.read_checkpoint(p)


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("dim 3 pts 2\n", 1),
    ("dim 2 points 2\na 0 0\n", 1),
    ("dim 2 points 1\na 0 x\n", 2),
    ("# comment\ndim 2 points 1\na 0\n", 3),
])
def test_malformed_config_reports_line(text, line):
    with pytest.raises(formats.FormatError) as err:
        formats.parse_config(text, "bad.cfg")
    assert err.value.line == line


def test_malformed_triangulation():
    with pytest.raises(formats.FormatError):
        formats.parse_triangulation("a b c d\n")
    with pytest.raises(formats.FormatError) as err:
        formats.parse_triangulation("config cube3\na b c z\n")
    assert err.value.line == 2


def test_certificate_and_expected_parsers():
    T = make_corner_cut("E", "ap")
    w = corner_cut_heights(T)
    assert parse_certificate(format_certificate(w), CUBE4) == w
    with pytest.raises(formats.FormatError):
        parse_certificate("a 0\n", CUBE4)
    assert parse_expected("S1 U0 U1-\n# x\nS3 U0\n") == {1: {"U0", "U1-"}, 3: {"U0"}}


# -- commands ----------------------------------------------------------------


def test_circuits_command():
    code, out = run("circuits", "cube4")
    assert code == 0
    assert "a d m p | a p / d m" in out.splitlines()
    code, out = run("circuits", "cube4", "--through", "a")
    lines = [line for line in out.splitlines() if "|" in line]
    assert all("a" in line.split("|")[0].split() for line in lines)
    assert report(out)["circuits"] == str(len(lines))


def test_malformed_file_is_an_input_error(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("dim 2 points 3\na 0 0\n")
    assert run("circuits", str(bad))[0] == 2
    assert run("circuits", "nope")[0] == 2
    assert run("circuits", "cube4", "--through", "z")[0] == 2
    assert run("frobnicate")[0] == 2


def test_enumerate_command():
    code, out = run("enumerate", "cube3", "--oracle")
    rep = report(out)
    assert code == 0
    assert (rep["triangulations"], rep["classes"], rep["oracle_agrees"]) == ("74", "6", "1")
    code, out = run("enumerate", "S1", "--mod-symmetry")
    rep = report(out)
    assert (rep["classes"], rep["total"]) == ("842", "4494")


def test_prop5_command(tmp_path):
    code, out = run("prop5")
    assert code == 0
    assert "L_a(S1)={U0,U1-,U1+} OK" in out
    assert "L_a(S2)={U0,U1-,U1+} OK" in out
    assert "L_a(S3)={U0} OK" in out
    assert "U1- cells: {b,c,f,l}/a" in out
    tampered = tmp_path / "expected.txt"
    tampered.write_text("S1 U0 U1- U1+\nS2 U0 U1- U1+\nS3 U0 U1-\n")
    code, out = run("prop5", "--expected", str(tampered))
    assert code == 1
    assert "L_a(S3)={U0} MISMATCH" in out


def test_connect_command(tmp_path):
    cc = tmp_path / "cc.tri"
    cc.write_text(formats.format_triangulation(make_corner_cut("O", "el")))
    code, out = run("connect", str(cc))
    assert code == 0 and "path length 0" in out
    walk = tmp_path / "walk.tri"
    walk.write_text((FIXTURES / "walk200.tri").read_text())
    dest = tmp_path / "walk.path"
    code, out = run("connect", str(walk), "--out", str(dest))
    assert code == 0 and report(out)["replay"] == "OK"
    start, moves = formats.parse_path(dest.read_text())
    assert start == formats.load_triangulation(str(walk))
    from cubeflip.driver import FlipPath
    from cubeflip.flips import is_flippable
    from cubeflip.kernel import radon_partition

    p = FlipPath(start)
    for sup, rem in moves:
        p.push(is_flippable(p.end, radon_partition(sup, CUBE4), rem))
    assert is_corner_cut(p.end) is not None


def test_connect_rejects_invalid_triangulation(tmp_path):
    T = make_corner_cut("E", "ap")
    bad = tmp_path / "bad.tri"
    lines = formats.format_triangulation(T).splitlines()
    bad.write_text("\n".join(lines[:-1]) + "\n")  # drop a cell
    assert run("connect", str(bad))[0] == 2


def test_regularity_command(tmp_path):
    T = make_corner_cut("E", "ap")
    tri = tmp_path / "cc.tri"
    tri.write_text(formats.format_triangulation(T))
    cert = tmp_path / "cc.cert"
    cert.write_text(format_certificate(corner_cut_heights(T)))
    code, out = run("regularity", str(tri), "--certificate", str(cert))
    assert code == 0 and "certificate OK" in out
    cert.write_text(format_certificate({x: 0 for x in CUBE4.labels}))
    assert run("regularity", str(tri), "--certificate", str(cert))[0] == 1
    code, out = run("regularity", "--all", "cube3")
    assert code == 0 and "74/74 regular" in out
    code, out = run("regularity", str(FIXTURES / "nonregular.tri"))
    assert code == 0 and "non-regular (LP infeasible)" in out
    written = tmp_path / "w.cert"
    run("regularity", str(tri), "--write-certificate", str(written))
    assert run("regularity", str(tri), "--certificate", str(written))[0] == 0


def test_config_dump_and_walk(tmp_path):
    code, out = run("config", "dump", "S1")
    assert code == 0
    body = out.split("config=")[0]
    cfg = formats.parse_config(body)
    assert cfg.coords == formats.preset("S1").coords
    dest = tmp_path / "w.tri"
    assert run("walk", "cube3", "--steps", "7", "--seed", "1", "--out", str(dest))[0] == 0
    T = formats.load_triangulation(str(dest))
    assert isinstance(T, Triangulation) and T.cfg == CUBE3
    # deterministic given the seed
    again = run("walk", "cube3", "--steps", "7", "--seed", "1")[1]
    assert again.startswith(dest.read_text())
