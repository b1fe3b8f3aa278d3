import json
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from dworkmod import cli
from dworkmod.config import parse_config, serialize
from dworkmod.errors import ParseError, ValidationError

MINIMAL = """
[ring]
p = 2
a = 1
N = 6

[caps]
D_T = 5

[sigma]
f1 = []

[module triv]
derive = trivial()

[task zeta]
kind = euler
module = triv
"""


def test_minimal_config_is_valid():
    cfg = parse_config(MINIMAL)
    assert (cfg.p, cfg.a, cfg.N, cfg.n) == (2, 1, 6, 1)
    assert cfg.W == 6 + 1 + 4
    assert [t.kind for t in cfg.tasks] == ["euler"]


def test_q_mismatch_is_rejected():
    with pytest.raises(ValidationError) as e:
        parse_config(MINIMAL.replace("[sigma]\n", "[sigma]\nq = 4\n"))
    assert e.value.field == "sigma.q"


def test_composite_p_is_rejected():
    with pytest.raises(ValidationError) as e:
        parse_config(MINIMAL.replace("p = 2", "p = 4"))
    assert "not prime" in str(e.value)


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_config("[ring]\np = 2\n[caps\n")
    assert e.value.line == 3


def test_unknown_task_kind():
    with pytest.raises(ValidationError):
        parse_config(MINIMAL.replace("kind = euler", "kind = frobnicate"))


def test_unknown_module_reference():
    with pytest.raises(ValidationError):
        parse_config(MINIMAL.replace("module = triv", "module = nope"))


def _config_text(p, N, D_T, coeffs, ks):
    entries = [[[((0,), 1), ((1,), p * c)]] for c in coeffs[:1]]
    return f"""
[ring]
p = {p}
N = {N}
[caps]
D_T = {D_T}
[sigma]
f1 = [((1,), 1)]
[module M]
rank = 1
entries = {entries}
[module S]
derive = sym_power(M, 2)
[task t]
kind = limiting
module = M
k = {", ".join(map(str, ks))}
"""


@given(st.sampled_from([2, 3, 5]), st.integers(1, 9), st.integers(1, 9),
       st.lists(st.integers(0, 10**30), min_size=1, max_size=2),
       st.lists(st.integers(-3, 9), min_size=1, max_size=4))
def test_round_trip(p, N, D_T, coeffs, ks):
    cfg = parse_config(_config_text(p, N, D_T, coeffs, ks))
    again = parse_config(serialize(cfg))
    assert again == cfg
    assert serialize(again) == serialize(cfg)


def test_euler_task_on_trivial_module():
    rep = cli.run(parse_config(MINIMAL))
    task = rep["tasks"][0]
    assert task["status"] == "ok"
    coeffs = [int(c) for c in task["result"]["lseries"]["coeffs"]]
    assert coeffs == [2**m % 2**6 for m in range(6)]
    assert cli.exit_code(rep) == 0


def test_unsupported_is_reported():
    text = MINIMAL.replace("f1 = []", "f1 = [((1, 0), 1)]\nf2 = []").replace("kind = euler", "kind = trace")
    rep = cli.run(parse_config(text))
    task = rep["tasks"][0]
    assert task["status"] == "unsupported"
    assert "UnsupportedDimension" in task["error"]
    assert cli.exit_code(rep) == 3


def test_report_is_deterministic_across_threads():
    cfg = parse_config(cli.shipped_configs()["line_p2"].read_text())
    a = cli.run(cfg, threads=1)
    b = cli.run(cfg, threads=3)
    assert json.dumps(a) == json.dumps(b)
    assert all("seconds" not in t for t in a["tasks"])


@pytest.mark.parametrize("name", ["line_p2", "unit_root_p2", "scan_p2"])
def test_shipped_configs_pass(name):
    rep = cli.run(parse_config(cli.shipped_configs()[name].read_text()))
    assert cli.exit_code(rep) == 0, [t.get("error") for t in rep["tasks"]]


def test_command_line(tmp_path):
    cfg = tmp_path / "zeta.ini"
    cfg.write_text(MINIMAL)
    out = tmp_path / "report.json"
    r = subprocess.run([sys.executable, "-m", "dworkmod", "run", str(cfg), "--out", str(out)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert json.loads(out.read_text())["inputs"]["q"] == 2
    bad = tmp_path / "bad.ini"
    bad.write_text(MINIMAL.replace("p = 2", "p = 4"))
    r = subprocess.run([sys.executable, "-m", "dworkmod", "run", str(bad)], capture_output=True, text=True)
    assert r.returncode == 4 and "not prime" in r.stderr


def test_verify_selection_and_csv(tmp_path, capsys):
    assert cli.main(["verify", "--suite", "1"]) == 0
    assert "[PASS] criterion  1" in capsys.readouterr().out
    assert cli.main(["verify", "--suite", "99"]) == 4
    cfg = tmp_path / "scan.ini"
    cfg.write_text(cli.shipped_configs()["scan_p2"].read_text())
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "r.json"), "--csv", str(tmp_path / "csv")]) == 0
    files = list((tmp_path / "csv").iterdir())
    assert files and files[0].read_text().startswith("k,slope,d_s,D_s,certified")
