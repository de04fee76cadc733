import csv
import io
import json

from besseweyl.cli import main


def test_check_forms(capsys):
    assert main(["check", "--suite", "forms"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["suite"] == "forms" and all(c["pass"] for c in out["checks"])
    assert set(out["meta"]) >= {"seed", "grid", "version"}


def test_unknown_suite_and_bad_flags(capsys):
    assert main(["check", "--suite", "nope"]) == 2
    assert main(["check", "--suite", "arith", "--grid", "4"]) == 2
    assert main(["spectrum", "--weights", "2,1"]) == 2


def test_config_file_overridden_by_flag(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("weights = 5,3\nseed = 7\n", encoding="utf-8")
    assert main(["spectrum", "--config", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["weights"] == [5, 3]
    assert main(["spectrum", "--config", str(cfg), "--weights", "3,1"]) == 0
    assert json.loads(capsys.readouterr().out)["weights"] == [3, 1]


def test_spectrum(capsys):
    assert main(["spectrum", "--weights", "3,1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert {v["exact"] for v in out["lengths"].values()} == {"4pi/3", "4pi"}
    assert main(["spectrum", "--weights", "5,3", "--via", "duality"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert max(out["residuals"]["deltas"].values()) < 1e-6


def test_embed_csv_round_trip(tmp_path):
    path = tmp_path / "p.csv"
    assert main(["embed", "--weights", "3,1", "--n-samples", "20", "--out", str(path)]) == 0
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert len(rows) == 20 and list(rows[0]) == ["r", "radius", "height"]
    for row in rows:
        for v in row.values():
            assert repr(float(v)) == v
    assert main(["embed", "--n-samples", "8"]) == 2


def test_geodesics_json(capsys):
    assert main(["geodesics", "--weights", "3,1", "--count", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ratio_to_2pi"] == "2"


def test_deform_usage_errors():
    assert main(["deform", "--weights", "3,1", "--lambda", "3"]) == 2
    assert main(["deform", "--weights", "4,2", "--lambda", "1.1"]) == 2
