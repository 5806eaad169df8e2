import json

import pytest

from padic_incidence.cli import main
from padic_incidence.dimsets import full_grid
from padic_incidence.documents import SetDocument, load_set, save
from padic_incidence.geometry import project_line, project_point
from padic_incidence.incidence import WeightedLineSet, WeightedPointSet, incidences
from padic_incidence.ring import RingParams


def run(capsys, *argv):
    rc = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return rc, out, err


def test_gen_full_grid(tmp_path, capsys):
    rc, _, _ = run(capsys, "gen", "full-grid", "--p", 2, "--k", 2, "--out", tmp_path / "g.json")
    assert rc == 0
    doc = load_set(tmp_path / "g.json")
    assert len(doc.points) == 16 and len(doc.lines) == 24


def test_gen_is_deterministic(tmp_path, capsys):
    for name in ("a.json", "b.json"):
        assert run(capsys, "gen", "random-alpha", "--p", 3, "--k", 2, "--alpha", 1, "--seed", 7,
                   "--out", tmp_path / name)[0] == 0
    a, b = (tmp_path / "a.json").read_bytes(), (tmp_path / "b.json").read_bytes()
    assert a == b
    assert len(json.loads(a)["certificates"]) == 2
    run(capsys, "gen", "random-alpha", "--p", 3, "--k", 2, "--alpha", 1, "--seed", 8, "--out", tmp_path / "c.json")
    assert (tmp_path / "c.json").read_bytes() != a


def test_gen_embed_fp(tmp_path, capsys):
    R = RingParams(3, 1)
    P, L = full_grid(R)
    P = WeightedPointSet(R, {k: 1 + k % 2 for k in P.keys()})
    save(SetDocument.from_sets(P, L), tmp_path / "fp.json")
    rc, _, _ = run(capsys, "gen", "embed-fp", "--p", 3, "--k", 2, "--config", tmp_path / "fp.json",
                   "--out", tmp_path / "lift.json")
    assert rc == 0
    _, a, _ = run(capsys, "count", tmp_path / "fp.json", "--weighted")
    _, b, _ = run(capsys, "count", tmp_path / "lift.json", "--weighted")
    assert json.loads(a) == json.loads(b) == {"I_w": incidences(P, L).count}


def test_count(tmp_path, capsys):
    run(capsys, "gen", "full-grid", "--p", 2, "--k", 1, "--out", tmp_path / "g.json")
    assert json.loads(run(capsys, "count", tmp_path / "g.json")[1]) == {"I": 12}
    R = RingParams(2, 1)
    save(SetDocument.from_sets(WeightedPointSet(R, {}), WeightedLineSet(R, {})), tmp_path / "e.json")
    assert json.loads(run(capsys, "count", tmp_path / "e.json")[1]) == {"I": 0}


def test_count_thicken_to_prime_field(tmp_path, capsys):
    run(capsys, "gen", "random-weighted", "--p", 3, "--k", 3, "--seed", 2, "--n", 40,
        "--out", tmp_path / "w.json")
    P, L = load_set(tmp_path / "w.json").to_sets()
    rc, out, _ = run(capsys, "count", tmp_path / "w.json", "--weighted", "--thicken", 2)
    assert rc == 0
    got = json.loads(out)
    R1 = RingParams(3, 1)
    Pp, Lp = {}, {}
    for q in P.points():
        key = project_point(q, 1).key
        Pp[key] = Pp.get(key, 0) + P.weight(q.key)
    for l in L.lines():
        key = project_line(l, 1).key
        Lp[key] = Lp.get(key, 0) + L.weight(l.key)
    assert got == {"I_w": incidences(WeightedPointSet(R1, Pp), WeightedLineSet(R1, Lp)).count,
                   "ring": {"p": 3, "k": 1}}


def test_spectral_and_regime(tmp_path, capsys):
    run(capsys, "gen", "full-grid", "--p", 2, "--k", 2, "--out", tmp_path / "grid22.json")
    rc, out, _ = run(capsys, "spectral", tmp_path / "grid22.json", "--j", 1)
    rep = json.loads(out)
    assert rc == 0 and rep["low_residual"] < 1e-6 and rep["total_residual"] < 1e-6
    rc, out, _ = run(capsys, "regime", 1000000, 1000000)
    assert rc == 0 and json.loads(out)["row"] == 3
    assert run(capsys, "spectral", tmp_path / "grid22.json", "--j", 2)[0] == 2


def test_reduce_command(tmp_path, capsys):
    run(capsys, "gen", "grid", "--p", 3, "--k", 2, "--case", 2, "--seed", 1, "--out", tmp_path / "grid_case2.json")
    rc, out, _ = run(capsys, "reduce", tmp_path / "grid_case2.json")
    assert rc == 0
    rep = json.loads(out)
    assert rep["trace"]["case"] == 2 and rep["trace"]["steps"][0]["op"] == "rescale"
    A, B = set(rep["frame"]["A"]), set(rep["frame"]["B"])
    assert all(a in A and b in B for a, b in rep["frame"]["G_image"])
    assert rep["grid"]["k"] == 1


def test_verify_exit_codes(tmp_path, capsys):
    good = {"seed": 1, "rings": [[2, 2]], "statements": ["prop37", "cs"],
            "generators": [{"name": "random-weighted", "params": {"n": 8}}, {"name": "separated"}],
            "budgets": {"instances": 2}}
    (tmp_path / "good.json").write_text(json.dumps(good))
    rc, out, _ = run(capsys, "verify", tmp_path / "good.json", "--out", tmp_path / "r")
    assert rc == 0 and json.loads(out)["failures"] == 0
    assert (tmp_path / "r" / "reports.jsonl").exists() and (tmp_path / "r" / "summary.csv").exists()

    bad = dict(good, statements=["thm13"], generators=[{"name": "corrupted"}])
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    rc, _, err = run(capsys, "verify", tmp_path / "bad.json", "--out", tmp_path / "r2")
    assert rc == 1 and "FAIL thm13/corrupted/p2k2/0" in err and "spacing_violated" in err

    assert run(capsys, "verify", tmp_path / "missing.json", "--out", tmp_path / "r3")[0] == 2
    (tmp_path / "broken.json").write_text('{"statements": ["nope"]}')
    assert run(capsys, "verify", tmp_path / "broken.json", "--out", tmp_path / "r3")[0] == 2


def test_bad_params_exit_2(tmp_path, capsys):
    assert run(capsys, "gen", "full-grid", "--p", 4, "--k", 2)[0] == 2
    assert run(capsys, "gen", "embed-fp", "--p", 3, "--k", 2)[0] == 2
    assert run(capsys, "count", tmp_path / "nothing.json")[0] == 2
    assert run(capsys, "regime", 0, 5)[0] == 2
    with pytest.raises(SystemExit):
        main(["gen", "no-such-generator"])
