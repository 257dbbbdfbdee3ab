from pathlib import Path

import pytest

from coarse.cli import EXIT_ERROR, EXIT_FAILS, EXIT_INCONCLUSIVE, EXIT_OK, main, run
from coarse.config import parse_config
from coarse.errors import ConfigSyntaxError, ParamOutOfRange, UnknownName

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def report_of(text, **kw):
    return run(parse_config(text), **kw)


def flat(report):
    out = {}
    for line in report.lines():
        k, _, v = line.partition(" = ")
        out[k] = v
    return out


def test_minimal_config():
    cfg = parse_config("space = zplus\nparams.window = 128\nrun.e = ends\n")
    assert cfg.params.window == 128
    assert [c.verb for c in cfg.commands] == ["ends"]
    kv = flat(run(cfg))
    assert kv["format.version"] == "1"
    assert kv["cmd.1.ends.count"] == "1"


def test_unknown_name():
    with pytest.raises(UnknownName) as err:
        parse_config("space = zn(1)\nrun.c = cover all : left, ray(+)\n")
    assert err.value.name == "left"


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("space = zplus\nsubspace.x = ray(+) $\n", 2, 21),
        ("space = zplus\nsubspace.x = union(ray(+),\n", 2, 27),
        ("space = zplus\nnonsense\n", 2, 1),
        ("space = zplus\nrun.a = frobnicate all\n", 2, 9),
        ("space = zplus\nparams.colour = 3\n", 2, 8),
    ],
)
def test_syntax_errors_carry_position(text, line, col):
    with pytest.raises(ConfigSyntaxError) as err:
        parse_config(text)
    assert (err.value.line, err.value.col) == (line, col)


def test_params_out_of_range():
    with pytest.raises(ParamOutOfRange):
        parse_config("space = zn(2)\nparams.window = 1000\n")
    with pytest.raises(ParamOutOfRange):
        parse_config("space = zplus\nparams.window = 16\nparams.scales = 1, 8\n")
    cfg = parse_config("space = zplus\nparams.window = 16\n", window=64)
    assert cfg.params.window == 64


def test_expression_forms_parse():
    cfg = parse_config(
        """
space.kind = zn
space.n = 2
space.metric = l1
params.window = 32
params.coeff = Z/2
subspace.a = union(sector(+,*), inter(halfspace(1, -1 >= 2), compl(ball(3))))
subspace.b = signcone(+,-; 4)
subspace.c = blocks(geom 3/2 period 3 phase 1 lo 3/4 hi 5/4)
subspace.d = blocks(0..5, 9..)
subspace.e = thicken(points((1, 2), (3, 4)), 2)
subspace.f = residue(3, 1, 1)
subspace.g = cone(10, 100)
subspace.h = ray((1, -1))
map.m = affine((1, 0), (0, 2) ; (1, 1))
map.n = restrictless
"""
        .replace("map.n = restrictless\n", "map.n = m\n")
    )
    assert set(cfg.subspaces) == set("abcdefgh")
    assert str(cfg.params.coeff) == "Z/2"
    assert cfg.maps["n"] is cfg.maps["m"]
    assert cfg.maps["m"]((2, 3)) == (3, 7)


def test_evens_odds_cover_fails_with_witness():
    r = report_of("space = zn(1)\nparams.window = 256\nrun.c = cover-check all : residue(2, 0), residue(2, 1)\n")
    assert r.results[0].status == "Fails"
    kv = flat(r)
    assert kv["cmd.1.verdict.R"] == "2" and kv["cmd.1.verdict.W"] == "256"
    a, b = kv["cmd.1.verdict.witness"].split()[0].split("~")
    assert abs(int(a) - int(b)) == 1
    assert r.exit_code() == EXIT_FAILS


def test_flasque_shift_holds():
    r = report_of("space = zplus\nparams.window = 256\nparams.horizon = 64\nmap.s = shift(1)\nrun.f = flasque-check s\n")
    assert r.results[0].status == "Holds"
    assert r.exit_code() == EXIT_OK


def test_errors_are_recorded_and_execution_continues():
    r = report_of("space = zn(1)\nparams.window = 256\nrun.a = cohomology all : residue(2, 0), residue(2, 1)\nrun.b = ends\n")
    assert [x.status for x in r.results] == ["Error", "Holds"]
    assert "CoverNotVerified" in flat(r)["cmd.1.error"]
    assert r.exit_code() == EXIT_ERROR


def test_inconclusive_exit_code():
    text = ("space = zn(2)\nparams.window = 64\n"
            "run.c = compare all : cone(0, 90), cone(72, 162), cone(144, 234), cone(216, 306), cone(288, 378) -> all\n")
    r = report_of(text)
    assert r.results[0].status == "Inconclusive"
    assert r.exit_code() == EXIT_INCONCLUSIVE


def test_shipped_cake_config_reproduces_cohomology():
    cfg = parse_config((CONFIGS / "z2_cake.cfg").read_text())
    kv = flat(run(cfg))
    idx = next(c.index for c in cfg.commands if c.verb == "cohomology")
    assert kv[f"cmd.{idx}.cohomology.H0.rank"] == "1"
    assert kv[f"cmd.{idx}.cohomology.H1.rank"] == "1"
    assert kv[f"cmd.{idx}.cohomology.H2.rank"] == "0"
    assert kv[f"cmd.{idx}.cohomology.H0.torsion"] == "none"


@pytest.mark.parametrize("name", ["z2_cake.cfg", "z_halves.cfg", "zplus.cfg"])
def test_reports_are_byte_identical(name, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.txt"
        main(["run", str(CONFIGS / name), "--out", str(out), "--seed", "5"])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"format.version = 1\n")


def test_main_exit_codes(tmp_path, capsys):
    assert main(["run", str(CONFIGS / "z2_cake.cfg")]) == EXIT_OK
    assert main(["run", str(CONFIGS / "z_halves.cfg")]) == EXIT_FAILS
    bad = tmp_path / "bad.cfg"
    bad.write_text("space = zplus\nrun.a = ends nowhere\n")
    assert main(["run", str(bad)]) == EXIT_ERROR
    assert "nowhere" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.cfg")]) == EXIT_ERROR


def test_window_override(tmp_path):
    out = tmp_path / "o.txt"
    main(["run", str(CONFIGS / "zplus.cfg"), "--window", "128", "--out", str(out)])
    assert "params.window = 128" in out.read_text()


def test_metric_check_seeded():
    text = "space = free_group(2)\nparams.window = 6\nparams.scales = 1\nrun.m = metric-check\n"
    a = flat(report_of(text, seed=1))
    b = flat(report_of(text, seed=1))
    assert a == b and a["cmd.1.metric.violations"] == "0"


def test_mayer_vietoris_command():
    text = ("space = zn(2)\nparams.window = 64\n"
            "subspace.a = union(cone(0, 90), cone(72, 162), cone(144, 234))\n"
            "subspace.b = union(cone(216, 306), cone(288, 378))\n"
            "run.mv = mayer-vietoris all : a, b | cone(0, 90), cone(72, 162), cone(144, 234), cone(216, 306), cone(288, 378)\n")
    kv = flat(report_of(text))
    assert kv["cmd.1.mv.exact"] == "true"
    assert kv["cmd.1.cohomology.H1.rank"] == "1"
