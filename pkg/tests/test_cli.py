import json

import numpy as np
import pytest

from gaplis import model
from gaplis.cli import main
from gaplis.sampling import SeedSpec, sample_bernoulli


def test_oracle_verify_pass_exit_zero(capsys):
    code = main(
        "oracle verify --identity gap-vs-lpp --m 2 --n 2 --h1 1 --h2 1 --p 1/2 --kmax 2".split()
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS" in out
    assert "lhs=3/4 rhs=3/4" in out


def test_limit_gh_prints_value_and_branch(capsys):
    code = main("limit gh --a 1 --b 1 --h1 1 --h2 1 --p 0.25".split())
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("0.6666666667")
    assert "branch=interior" in out


def test_solve_discrete_rejects_zero_gaps(tmp_path, capsys):
    fld = sample_bernoulli(4, 4, 0.5, SeedSpec(1, 0))
    path = tmp_path / "f.txt"
    model.write_bitfield(fld, path)
    code = main(["solve", "discrete", "--field", str(path), "--h1", "0", "--h2", "0"])
    err = capsys.readouterr().err
    assert code == 2
    assert "(0, 0)" in err


def test_missing_file_is_usage_error(capsys):
    code = main(["solve", "discrete", "--field", "/nope/f.txt", "--h1", "1", "--h2", "1"])
    assert code == 2
    assert "missing file" in capsys.readouterr().err


def test_unknown_flag_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["limit", "f", "--bogus", "1"])
    assert exc.value.code == 2


def test_sample_solve_roundtrip(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    assert main(f"sample poisson --x 5 --t 5 --lam 1 --seed 11 --out {pts}".split()) == 0
    capsys.readouterr()
    out_json = tmp_path / "res.json"
    code = main(
        f"solve continuous --points {pts} --h1 1 --h2 1 --witness --out {out_json}".split()
    )
    printed = capsys.readouterr().out
    assert code == 0
    payload = json.loads(out_json.read_text())
    assert payload["length"] == json.loads(printed)["length"]
    assert len(payload["witness"]) == payload["length"]


def test_field_roundtrip_preserves_value(tmp_path):
    fld = sample_bernoulli(9, 7, 0.4, SeedSpec(21, 0))
    path = tmp_path / "f.txt"
    model.write_bitfield(fld, path)
    back = model.read_bitfield(path)
    assert np.array_equal(back.bits, fld.bits)


def test_lines_json_schema(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    main(f"sample poisson --x 6 --t 6 --lam 1 --seed 3 --out {pts}".split())
    out = tmp_path / "lines.json"
    fig = tmp_path / "lines.png"
    code = main(
        f"lines --points {pts} --h1 1 --h2 1 --out {out} --figure {fig}".split()
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["schema_version"] == 1
    assert all("corners" in line for line in payload["lines"])
    assert fig.exists()


def test_couple_verify_pass_and_csv(tmp_path, capsys):
    out = tmp_path / "verify.csv"
    code = main(
        (
            "couple verify --identity disc-gap-vs-lpp --m 2 --n 2 --h1 1 --h2 1 "
            f"--p 0.5 --kmax 2 --n-replicas 2000 --seed 5 --out {out}"
        ).split()
    )
    assert code == 0
    header = out.read_text().splitlines()[0]
    assert header == "k,lhs_cdf,rhs_cdf,ci_lo,ci_hi,n_replicas"


def test_couple_transform_files(tmp_path, capsys):
    field = tmp_path / "f.txt"
    main(f"sample bernoulli --m 12 --n 10 --p 0.3 --seed 5 --out {field}".split())
    assert main(f"couple clump --field {field} --out {tmp_path/'w.csv'}".split()) == 0
    assert main(f"couple psi --field {field} --h 2 --out {tmp_path/'psi.txt'}".split()) == 0
    assert (
        main(
            f"couple dilate-disc --field {field} --h1 3 --h2 2 --p 0.3 "
            f"--aux-seed 77 --out {tmp_path/'dd.txt'}".split()
        )
        == 0
    )
    w = model.read_weightfield(tmp_path / "w.csv")
    assert w.weights.min() >= 0


def test_mc_run_cli(tmp_path, capsys):
    spec = {
        "kind": "lln_disc",
        "sizes": [60],
        "replicas": 8,
        "master_seed": 4242,
        "h": [1, 1],
        "p": 0.25,
        "tolerances": {"mean_abs_err": 0.1},
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    code = main(f"mc run --spec {spec_path} --out {tmp_path/'rep'} --threads 1".split())
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS" in out
    assert (tmp_path / "rep.csv").exists()
    assert (tmp_path / "rep.png").exists()  # figure rendered alongside the CSV
    assert (tmp_path / "rep.json").exists()


def test_mc_run_no_figures(tmp_path, capsys):
    spec = {
        "kind": "lln_disc",
        "sizes": [60],
        "replicas": 8,
        "master_seed": 4242,
        "h": [1, 1],
        "p": 0.25,
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    code = main(
        f"mc run --spec {spec_path} --out {tmp_path/'rep'} --no-figures".split()
    )
    assert code == 0
    assert not (tmp_path / "rep.png").exists()


def test_malformed_spec_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(f"mc run --spec {bad} --out {tmp_path/'x'}".split()) == 2
    bad.write_text(json.dumps({"kind": "bogus", "sizes": [1], "replicas": 2, "master_seed": 0}))
    assert main(f"mc run --spec {bad} --out {tmp_path/'x'}".split()) == 2


def test_limit_regime_inf(capsys):
    assert main("limit regime --a 2 --b 3 --c inf".split()) == 0
    out = capsys.readouterr().out
    assert "t_over_h" in out and "2.0000000000" in out


def test_sandwich_cli(tmp_path, capsys):
    import math

    xs = np.linspace(-6, 6, 100)
    fs = 0.5 * (1 + np.vectorize(math.erf)(xs / math.sqrt(2)))
    table = tmp_path / "tw.csv"
    table.write_text("x,F\n" + "".join(f"{x},{f}\n" for x, f in zip(xs, fs)))
    code = main(
        f"limit sandwich --a 1 --b 2 --h1 1 --h2 1 --p 0.25 --x 1.0 --tw-table {table}".split()
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "lower=" in out and "upper=" in out
