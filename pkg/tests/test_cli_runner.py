import json

import pytest

from asdcong import cli_runner
from asdcong.cli_runner import RunConfig, UsageError, main, parse_primes, resolve_threads


@pytest.fixture(autouse=True)
def _cache(tmp_path, monkeypatch):
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "cache"))
    monkeypatch.delenv(cli_runner.THREADS_ENV, raising=False)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_prime_lists():
    assert parse_primes("3,7,13") == [3, 7, 13]
    assert parse_primes("3-20") == [3, 5, 7, 11, 13, 17, 19]
    for bad in ("9", "2", "x", ""):
        with pytest.raises(UsageError):
            parse_primes(bad)


def test_config_validation():
    with pytest.raises(UsageError):
        RunConfig("traces", primes=[3], r_max=0)
    with pytest.raises(UsageError):
        RunConfig("traces", primes=[4])


def test_thread_flag_wins(monkeypatch):
    monkeypatch.setenv(cli_runner.THREADS_ENV, "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
    monkeypatch.setenv(cli_runner.THREADS_ENV, "many")
    with pytest.raises(UsageError):
        resolve_threads(None)


@pytest.mark.parametrize(
    "argv",
    [
        ["traces", "--p", "9", "--model", "k3n4"],
        ["traces", "--p", "3", "--rmax", "1", "--model", "gamma15"],
        ["verify-asd", "--p", "2"],
        ["traces", "--p", "3", "--model", "nope"],
        ["series", "h7"],
        ["verify-asd", "--p", "3", "--N", "10", "--precision", "3"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err.startswith("error:")


def test_traces_csv(capsys):
    code, out, _ = run(["traces", "--p", "3,7,13,17", "--rmax", "3", "--model", "k3n4", "--format", "csv"], capsys)
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "model,p,r,trace"
    assert "K3_N4,13,1,10" in rows
    assert "K3_N4,17,1,-10" in rows
    assert len(rows) == 1 + 4 * 3


def test_traces_json_to_file(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert main(["traces", "--p", "13", "--rmax", "2", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert {d["model"] for d in doc} == {"K3_N2", "K3_N4"}


def test_charpoly(capsys):
    code, out, _ = run(["charpoly", "--p", "3,13,17"], capsys)
    assert code == 0
    recs = {r["p"]: r for r in json.loads(out)}
    assert recs[3]["rho4"] == [1, 0, -19, 0, 171, 0, -729]  # (x^2-9)(x^4-10x^2+81)
    assert recs[17]["wminus"] == [1, -20, 678, -5780, 83521]  # (x^2-10x+289)^2
    assert recs[13]["rho2"][-1] == 169 and recs[13]["rho4"][-1] == 13**6
    assert all(all(r["checks"].values()) for r in recs.values())


def test_calibrate_is_idempotent_and_repairs(tmp_path, capsys):
    path = tmp_path / "cal.json"
    code, out, _ = run(["calibrate", "--out", str(path)], capsys)
    assert code == 0 and "rebuilt" in out
    first = path.read_bytes()
    doc = json.loads(first)
    E1 = doc["payload"]["E1"]["coeffs"]
    E2 = doc["payload"]["E2"]
    assert E1[0] == "1"
    assert E2["val"] == "1/5" and E2["coeffs"][0] == "1"
    assert doc["payload"]["oracle_residual_zero"]
    code, out, _ = run(["calibrate", "--out", str(path)], capsys)
    assert "verified" in out
    assert path.read_bytes() == first
    path.write_text(first.decode().replace('"-2"', '"-3"', 1))
    assert cli_runner.load_calibration(path) is None
    code, out, _ = run(["calibrate", "--out", str(path)], capsys)
    assert code == 0 and "rebuilt" in out
    assert path.read_bytes() == first


def test_series_dump(capsys):
    code, out, _ = run(["series", "h1", "--trunc", "20", "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines()[2] == "5,20,-13/4,0,0,0"
    code, out, _ = run(["series", "f3", "--trunc", "20"], capsys)
    doc = json.loads(out)
    assert doc["width"] == 8 and doc["terms"][0][0] == "3/8"


def test_verify_asd_perturbed(capsys):
    code, out, _ = run(["verify-asd", "--p", "13", "--N", "100", "--perturb"], capsys)
    assert code == 1
    lines = [l for l in out.splitlines() if l.startswith("p=")]
    assert "h1" in lines[0] and "FAIL" in lines[0]
    assert "h3" in lines[1] and "PASS" in lines[1]


def test_verify_asd_deterministic_across_threads(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify-asd", "--p", "3,5", "--N", "30", "--threads", "1", "--out", str(a)]) == 0
    assert main(["verify-asd", "--p", "3,5", "--N", "30", "--threads", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_all(tmp_path, capsys):
    out = tmp_path / "all.json"
    code, text, _ = run(["verify-all", "--p", "3,7", "--N", "40", "--out", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["asd"]["ok"]
    assert "p=3   charpoly ok" in text
