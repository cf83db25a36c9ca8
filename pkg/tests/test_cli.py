"""Exit codes, report shapes, and expression handling of the command-line
front end."""

import json

import pytest

from rslminors import __version__
from rslminors.cli import (
    EXIT_FAIL,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_USAGE,
    eval_n_expression,
    main,
)
from rslminors.instance import RslParams, gen_instance
from rslminors.instance_io import load_instance

TOY_ARGS = [
    "--q", "2", "--m", "14", "--n", "10", "--k", "5", "--r", "2",
    "--N", "9", "--seed", "3",
]


@pytest.fixture(scope="module")
def toy_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "toy.rsl"
    assert main(["gen", *TOY_ARGS, "-o", str(path)]) == EXIT_OK
    return path


def test_eval_n_expression():
    assert eval_n_expression("k*(r-1)", 4, 3) == 8
    assert eval_n_expression("k*(r-2)", 179, 7) == 895
    assert eval_n_expression("2+3*4", 0, 0) == 14
    assert eval_n_expression("10-2-3", 0, 0) == 5
    assert eval_n_expression("(k+r)*(k-r)", 5, 2) == 21
    assert eval_n_expression(" 42 ", 0, 0) == 42
    for bad in ("k*(x+1)", "", "k*", "(k", "k)", "3 4"):
        with pytest.raises(ValueError):
            eval_n_expression(bad, 4, 3)


def test_gen_round_trip(tmp_path, capsys):
    path = tmp_path / "toy12.rsl"
    rc = main([
        "gen", "--q", "2", "--m", "12", "--n", "12", "--k", "4", "--r", "3",
        "--N", "9", "--seed", "7", "-o", str(path),
    ])
    assert rc == EXIT_OK
    assert f"wrote {path}" in capsys.readouterr().out
    inst, witness = load_instance(str(path))
    direct, direct_wit = gen_instance(RslParams(q=2, m=12, n=12, k=4, r=3, N=9), 7)
    assert inst.params == direct.params
    assert inst.H == direct.H and inst.S == direct.S
    assert witness is not None and witness.C == direct_wit.C


def test_gen_easy_regime_warning(tmp_path, capsys):
    path = tmp_path / "easy.rsl"
    rc = main([
        "gen", "--q", "2", "--m", "6", "--n", "6", "--k", "2", "--r", "2",
        "--N", "4", "-o", str(path),
    ])
    assert rc == EXIT_OK
    assert "easy regime" in capsys.readouterr().out


def test_gen_bad_expression(tmp_path, capsys):
    rc = main([
        "gen", "--q", "2", "--m", "6", "--n", "6", "--k", "2", "--r", "2",
        "--N", "k*(x+1)", "-o", str(tmp_path / "x.rsl"),
    ])
    assert rc == EXIT_USAGE
    assert "gen:" in capsys.readouterr().err


def test_gen_missing_flag(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--q", "2", "--m", "6", "-o", str(tmp_path / "x.rsl")])
    assert exc.value.code == EXIT_USAGE


def test_inspect_json(toy_file, tmp_path):
    out = tmp_path / "inspect.json"
    rc = main(["inspect", str(toy_file), "--report", "json", "-o", str(out)])
    assert rc == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["version"] == __version__
    assert rep["command"] == "inspect"
    assert rep["params"] == {"q": 2, "m": 14, "n": 10, "k": 5, "r": 2, "N": 9}
    assert rep["systematic"] is True
    assert rep["easy_regime"] is False
    assert rep["has_secret"] is True
    assert rep["strategies"][0] == {"delta": 0, "w": 2, "a": 4, "N_prime": 9}
    assert len(rep["modulus"]) == 15


def test_inspect_text(toy_file, capsys):
    assert main(["inspect", str(toy_file)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "strategies (delta, w, a, N')" in out


def test_inspect_missing_file(tmp_path, capsys):
    rc = main(["inspect", str(tmp_path / "nope.rsl")])
    assert rc == EXIT_FAIL
    assert "inspect:" in capsys.readouterr().err


def test_attack_recovers_toy(toy_file, tmp_path):
    out = tmp_path / "attack.json"
    rc = main([
        "attack", "--instance", str(toy_file), "--b-max", "2",
        "--report", "json", "-o", str(out),
    ])
    assert rc == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["success"] is True
    assert rep["planted_match"] is True
    assert rep["support_dim"] == 2
    assert rep["strategy"] == {"delta": 0, "w": 2, "a": 4, "N_prime": 9}
    assert rep["config"]["b_max"] == 2
    assert rep["b_history"][0]["b"] == 1


def test_attack_public_only(tmp_path):
    path = tmp_path / "pub.rsl"
    assert main(["gen", *TOY_ARGS, "--public-only", "-o", str(path)]) == EXIT_OK
    inst, witness = load_instance(str(path))
    assert witness is None
    out = tmp_path / "attack.json"
    rc = main([
        "attack", "--instance", str(path), "--b-max", "2",
        "--report", "json", "-o", str(out),
    ])
    assert rc == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["planted_match"] is None
    assert rep["verified"] is True


def test_attack_infeasible_b_max(toy_file, capsys):
    rc = main(["attack", "--instance", str(toy_file), "--b-max", "0"])
    assert rc == EXIT_INFEASIBLE
    assert "no recovery up to b=0" in capsys.readouterr().out


def test_attack_bad_strategy(toy_file, capsys):
    assert main(["attack", "--instance", str(toy_file), "--delta", "5"]) == EXIT_USAGE
    assert main(["attack", "--instance", str(toy_file), "--a", "99"]) == EXIT_USAGE
    capsys.readouterr()


def test_attack_needs_instance_or_params(capsys):
    rc = main(["attack", "--m", "14", "--n", "10"])
    assert rc == EXIT_USAGE
    assert "give --instance or full parameters" in capsys.readouterr().err


def test_estimate_single_row(tmp_path, capsys):
    out = tmp_path / "est.json"
    args = [
        "estimate", "--m", "277", "--n", "358", "--k", "179", "--r", "7",
        "--N", "k*(r-1)", "--deltas", "0", "--b-max", "3",
    ]
    rc = main([*args, "--report", "json", "-o", str(out)])
    assert rc == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["params"]["N"] == 1074
    best = rep["best"]
    assert best["delta"] == 0 and best["b"] == 1
    assert best["algorithm"] == "strassen"
    assert abs(best["log2_cost"] - 145) <= 2
    assert "ghpt" in rep and rep["ghpt"]["degenerate"] is False
    assert main(args) == EXIT_OK
    text = capsys.readouterr().out
    assert "best: delta=0" in text
    assert "combinatorial baseline:" in text


def test_estimate_table2(tmp_path):
    out = tmp_path / "table2.json"
    rc = main(["estimate", "--table2", "--report", "json", "-o", str(out)])
    assert rc == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["ok"] is True and rep["delta0_ok"] is True
    assert len(rep["rows"]) == 9


def test_estimate_usage_errors(capsys):
    assert main(["estimate", "--m", "277"]) == EXIT_USAGE
    rc = main([
        "estimate", "--m", "277", "--n", "358", "--k", "179", "--r", "7",
        "--N", "716", "--deltas", "0,x",
    ])
    assert rc == EXIT_USAGE
    capsys.readouterr()


def test_verify_prop1(tmp_path):
    out = tmp_path / "prop1.json"
    rc = main([
        "verify", "prop1", "--trials", "400", "--report", "json", "-o", str(out),
    ])
    assert rc == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["ok"] is True
    assert len(rep["cells"]) == 4
    assert all(abs(c["z"]) <= 3 for c in rep["cells"])


def test_verify_thm1_short_run(tmp_path):
    out = tmp_path / "thm1.json"
    rc = main([
        "verify", "thm1", "--trials", "2", "--q", "2",
        "--quarantine-dir", str(tmp_path), "--report", "json", "-o", str(out),
    ])
    assert rc == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["ok"] is True and rep["trials"] >= 2


def test_verify_bad_suite():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "thm9"])
    assert exc.value.code == EXIT_USAGE


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out
