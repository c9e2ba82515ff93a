import subprocess
import sys
from pathlib import Path

import pytest

from patchdense.cli import main

HERE = Path(__file__).parent
FIXTURE = str(HERE / "fixtures" / "small.space")

GOLDEN = {
    "demo_chromatic_8.txt": ["demo", "chromatic", "--depth", "8"],
    "dense_s2.txt": ["dense", FIXTURE, "--space", "S2", "--subset", "a,b"],
    "reconstruct_chromatic.txt": [
        "reconstruct", "--support", "chromatic-supp", "--dense", "finite-points", "--levels", "4",
    ],
    "pro_dense_table.txt": ["pro-dense", FIXTURE, "--prospace", "T", "--family", "sections"],
    "pro_dense_exclude_porcelain.txt": ["pro-dense", "--exclude", "C3", "--porcelain"],
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fields(out):
    return dict(line.split(": ", 1) for line in out.splitlines() if ": " in line)


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden(capsys, name):
    code, out, _ = run(capsys, *GOLDEN[name])
    assert code == 0
    assert out == (HERE / "golden" / name).read_text()


def test_repeatable_in_fresh_processes():
    argv = [sys.executable, "-m", "patchdense.cli", *GOLDEN["demo_chromatic_8.txt"]]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second == (HERE / "golden" / "demo_chromatic_8.txt").read_bytes()


def test_false_verdict_still_exits_zero(capsys):
    code, out, _ = run(capsys, "dense", FIXTURE, "--space", "S2", "--subset", "a")
    assert code == 0
    f = fields(out)
    assert f["dense"] == "false" and f["missed"] == "{b}"


@pytest.mark.parametrize("argv, message", [
    (["dense", FIXTURE, "--space", "S2", "--subset", "z"], "not an element"),
    (["dense", FIXTURE, "--space", "Nope", "--subset", "a"], "no space named"),
    (["visible", "--point", "C0"], "cannot read point"),
    (["pro-dense", "--depth", "-1"], "non-negative"),
    (["singleton", FIXTURE, "--prospace", "T", "--point", "5:x"], "beyond"),
    (["thomason", str(HERE / "missing.space"), "--subset", "a"], "cannot read"),
])
def test_input_errors_exit_nonzero(capsys, argv, message):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert message in err


def test_usage_error_exits_nonzero(capsys):
    code, _, _ = run(capsys, "no-such-command")
    assert code == 2


def test_depth_and_bound_always_reported(capsys):
    for argv in GOLDEN.values():
        _, out, _ = run(capsys, *argv)
        keys = [line.split(":")[0].split("\t")[0] for line in out.splitlines()]
        assert "depth" in keys and "bound" in keys


def test_table_space_reports_clamped_depth(capsys):
    _, out, _ = run(capsys, "visible", FIXTURE, "--prospace", "T", "--point", "1:x0")
    f = fields(out)
    assert f["depth"] == "2" and f["status"] == "VISIBLE"


def test_finite_commands(capsys):
    _, out, _ = run(capsys, "dual", FIXTURE, "--space", "V")
    assert "  t -> u" in out and "  t -> v" in out
    _, out, _ = run(capsys, "thomason", FIXTURE, "--space", "S2", "--subset", "a")
    assert fields(out)["thomason"] == "false"
    _, out, _ = run(capsys, "lemma-dense-epi", FIXTURE, "--space", "V", "--map", "p=u,q=v,r=t")
    f = fields(out)
    assert (f["constructible"], f["open_pairs"], f["sierpinski"]) == ("true",) * 3
    _, out, _ = run(capsys, "realize", FIXTURE, "--space", "V", "--subset", "u,t")
    assert fields(out)["image"] == "{t,u}"


def test_lattice_commands(capsys):
    _, out, _ = run(capsys, "closure", FIXTURE)
    assert fields(out)["points"] == "{{a,b,c},{a,b},{a}}"
    _, out, _ = run(capsys, "closure-ev", FIXTURE)
    assert fields(out)["isomorphic_to_closure"] == "true"


def test_random_checks_depend_on_seed(capsys):
    _, a, _ = run(capsys, "lemma-dense-epi", "--random", "50", "--seed", "1")
    _, b, _ = run(capsys, "lemma-dense-epi", "--random", "50", "--seed", "1")
    assert a == b and fields(a)["agree"] == "50"
    _, out, _ = run(capsys, "closure-ev", "--random", "50", "--seed", "4")
    assert fields(out)["agree"] == "50"


def test_support_commands(capsys):
    _, out, _ = run(capsys, "distinguish", FIXTURE, "--support", "d", "--map", "x=a")
    f = fields(out)
    assert f["distinguishes"] == "false" and f["witness_distinguish"] == "g / 0"
    _, out, _ = run(capsys, "classify", FIXTURE, "--support", "d", "--thomason", "b")
    assert fields(out)["exact"] == "true"
    _, out, _ = run(capsys, "classify", "--thomason", "3:C3,Cinf")
    assert fields(out)["support_of_ideal"] == "level 2 : {Cinf}"


def test_singleton_and_visibility(capsys):
    _, out, _ = run(capsys, "singleton", "--point", "Cinf", "--depth", "12")
    f = fields(out)
    assert f["constructible"] == "NO" and f["depth"] == "12"
    _, out, _ = run(capsys, "singleton", "--point", "C4")
    assert fields(out)["witness"] == "level 4 : {C4}"


def test_timing_is_opt_in(capsys):
    _, out, _ = run(capsys, "demo", "chromatic", "--depth", "3")
    assert "elapsed_ms" not in out
    _, out, _ = run(capsys, "demo", "chromatic", "--depth", "3", "--timing")
    assert "elapsed_ms" in out
