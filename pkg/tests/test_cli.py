import csv
import io
import json
import subprocess
import sys

import pytest

from erdos_sums import cli, verify
from erdos_sums.errors import PrecisionNotAchieved


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture(scope="module")
def table_outputs():
    base = ["table", "--kmax", "4", "--digits", "10"]
    return {fmt: run(*base, "--format", fmt) for fmt in ("csv", "json", "plain")}


def test_table_formats_consistent(table_outputs):
    code, text = table_outputs["csv"]
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0] == "k,value,bracket_width,digits"
    code, text = table_outputs["json"]
    assert code == 0
    data = json.loads(text)
    assert [d["k"] for d in data] == [1, 2, 3, 4]
    for r, d in zip(rows, data):
        assert r["value"] == d["value"]
        assert int(r["digits"]) == d["digits_certified"] >= 10
        assert d["provenance"]["precision"] == 10
        assert set(d["components"]) == {"singularity", "main", "tail"}
        # certified digits plus two uncertain ones after the point
        assert len(d["value"].split(".")[1]) == d["digits_certified"] + 2
    assert rows[0]["value"].startswith("1.636616323")
    code, text = table_outputs["plain"]
    assert code == 0 and "[" in text.splitlines()[2]


def test_table_deterministic(table_outputs):
    assert run("table", "--kmax", "4", "--digits", "10", "--format", "csv") == table_outputs["csv"]


def test_table_deltas_squarefree():
    code, text = run("table", "--kmax", "3", "--digits", "8", "--squarefree", "--deltas", "--format", "json")
    data = json.loads(text)
    assert code == 0 and data[0]["quantity"] == "f(N*_k) - 6/pi^2"
    assert float(data[1]["value"]) == pytest.approx(0.8909254794 - 0.6079271019, rel=1e-8)
    code, text = run("table", "--kmax", "2", "--digits", "8", "--deltas", "--format", "json")
    assert float(json.loads(text)[1]["value"]) == pytest.approx(1 - 1.1448165734, rel=1e-8)


def test_constants_and_cache(tmp_path):
    code, text = run("constants", "--digits", "15", "--format", "json", "--cache-dir", str(tmp_path))
    values = json.loads(text)["values"]
    assert code == 0 and values["alpha"].startswith("0.72926")
    assert values["h_prime_1"].startswith("-0.75536")
    assert (tmp_path / "constants.txt").exists()
    assert run("constants", "--digits", "15", "--format", "json", "--cache-dir", str(tmp_path)) == (code, text)


def test_beta():
    code, text = run("beta", "--k", "20", "--digits", "15", "--format", "csv")
    assert code == 0 and text.splitlines()[1].startswith("beta_20,0.99104987280755")


def test_sieve_commands(tmp_path):
    snap = tmp_path / "s.txt"
    code, text = run("sieve", "--limit", "1e4", "--kmax", "3", "--output", str(snap))
    assert code == 0 and text.startswith("erdos-sums-sieve v1")
    assert snap.read_text().rstrip("\n") == text.rstrip("\n")
    code, text = run("sieve", "--limit", "30", "--k", "2", "--q", "2", "--a", "0", "--format", "csv")
    assert code == 0 and text.splitlines()[1].endswith(",6")


def test_asymptotic_command():
    code, text = run("asymptotic", "--k", "1", "--x", "1e8", "--format", "json")
    assert code == 0
    assert float(next(iter(json.loads(text)["values"].values()))) == pytest.approx(1.74e7, rel=0.1)


def test_verify_identities_passes():
    code, text = run("verify", "identities", "--digits", "12")
    assert code == 0 and text.rstrip().endswith("checks passed")


@pytest.mark.parametrize("argv", [
    ["table", "--kmax", "0"],
    ["table", "--kmax", "61"],
    ["table", "--format", "xml"],
    ["verify", "bogus"],
    ["nothing"],
    ["sieve", "--limit", "abc"],
    ["sieve", "--q", "3"],
    ["beta", "--k", "5"],
    ["table", "--digits", "0"],
    ["asymptotic", "--k", "1", "--x", "1e8", "--q", "3", "--squarefree"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == cli.EXIT_USAGE


def test_verification_failure_exit(monkeypatch):
    def failing(name, ctx, **kw):
        rep = verify.SuiteReport(name)
        rep.add("forced", -1)
        return rep
    monkeypatch.setattr(verify, "run_suite", failing)
    code, text = run("verify", "identities")
    assert code == cli.EXIT_VERIFY and "FAIL  forced" in text


def test_precision_failure_exit(monkeypatch):
    def boom(*a, **kw):
        raise PrecisionNotAchieved("forced")
    monkeypatch.setattr(cli, "integrate_family", boom)
    assert run("table", "--kmax", "2")[0] == cli.EXIT_PRECISION


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "erdos_sums", "beta", "--k", "12", "--digits", "8"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "beta_12" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "erdos_sums", "table", "--kmax", "x"],
                          capture_output=True, text=True)
    assert proc.returncode == 3
