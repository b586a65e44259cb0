import csv
import io
import math

import pytest
from scipy import special

from mdpsk_div.cli import main
from mdpsk_div.config import config_from_manifest

SMALL = """\
snr_db = 5, 15
trials = 20000
seed = 3
branch.1.kappa = 3
branch.1.fd_T = 0.03
branch.1.fraction = 0.3
branch.2.kappa = 3
branch.2.fd_T = 0.05
branch.2.fraction = 0.7
"""


def rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


@pytest.fixture
def small(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(SMALL)
    return str(p)


def test_rho_default(capsys):
    assert main(["rho"]) == 0
    r = rows(capsys.readouterr().out)
    direct = [x for x in r if x["mode"] == "direct"]
    assert (float(direct[0]["re"]), float(direct[0]["im"])) == pytest.approx((0.9871, 0.1519), abs=1e-3)
    assert (float(direct[1]["re"]), float(direct[1]["im"])) == pytest.approx((0.9642, 0.2511), abs=1e-3)


def test_rho_isotropic(capsys):
    assert main(["rho", "--kappa", "0", "--fd-T", "0.03"]) == 0
    r = rows(capsys.readouterr().out)[0]
    assert float(r["im"]) == 0.0
    assert float(r["re"]) == pytest.approx(special.j0(2 * math.pi * 0.03), abs=1e-6)


def test_analyze(capsys, small):
    assert main(["analyze", "--config", small]) == 0
    out = capsys.readouterr().out
    r = rows(out)
    assert [float(x["snr_per_bit_db"]) for x in r] == [5.0, 15.0]
    for x in r:
        assert x["p_j1"] == x["p_j2"]
        assert float(x["p_j3"]) == pytest.approx(float(x["p_j3_oracle"]), rel=1e-6)
    assert config_from_manifest(out)[0].snr_db == (5.0, 15.0)


def test_analyze_decorrelated(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text("snr_db = 10\nbranch.1.rho = 0\nbranch.1.fraction = 1\n")
    assert main(["analyze", "--config", str(p)]) == 0
    r = rows(capsys.readouterr().out)[0]
    for k in ("p_j1", "p_j2", "p_j3", "p_avg", "p_j3_oracle", "p_j3_exact"):
        assert float(r[k]) == 0.5


def test_simulate_to_file_is_repeatable(tmp_path, small):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", small, "--out", str(a), "--receiver", "17,20"]) == 0
    assert main(["simulate", "--config", small, "--out", str(b), "--receiver", "17,20", "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    r = rows(a.read_text())
    assert [x["receiver"] for x in r] == ["17", "20", "17", "20"]
    assert all(x["trials"] == "20000" and x["seed"] == "3" for x in r)


def test_seed_override_changes_output(capsys, small):
    main(["simulate", "--config", small])
    first = capsys.readouterr().out
    main(["simulate", "--config", small, "--seed", "4"])
    second = capsys.readouterr().out
    assert first != second and "# seed = 4" in second


def test_validate_columns(capsys, small):
    assert main(["validate", "--config", small, "--trials", "10000"]) == 0
    r = rows(capsys.readouterr().out)
    for key in ("z_j1", "z_j3", "a_j3_exact", "z_j3_exact", "z_avg_exact"):
        assert key in r[0]


def test_stamp(capsys, small):
    main(["analyze", "--config", small, "--stamp"])
    assert "# timestamp = " in capsys.readouterr().out


def test_config_error_exit(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("branch.1.rho = 1\nbranch.1.fraction = 0.5\n")
    assert main(["analyze", "--config", str(p)]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["analyze", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_non_eight_ary_rejected_for_analysis(tmp_path):
    p = tmp_path / "q.cfg"
    p.write_text("m_ary = 4\nbranch.1.rho = 0.9\nbranch.1.fraction = 1\n")
    assert main(["analyze", "--config", str(p)]) == 2
    assert main(["simulate", "--config", str(p), "--trials", "10000"]) == 0


def test_numerical_error_exit(tmp_path, capsys):
    p = tmp_path / "deg.cfg"
    p.write_text("snr_db = 10\nbranch.1.rho = 0.9\nbranch.1.fraction = 0.5\n"
                 "branch.2.rho = 0.9\nbranch.2.fraction = 0.5\n")
    assert main(["analyze", "--config", str(p)]) == 3
    assert "numerical error" in capsys.readouterr().err


def test_bad_trials_override(small):
    assert main(["simulate", "--config", small, "--trials", "5"]) == 2


def test_bad_receiver_is_usage_error(small):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--config", small, "--receiver", "21"])
    assert exc.value.code == 2
