import json

import pytest

from spanlab.cli import main


def test_gen_writes_structure(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["gen", "--kind", "c4e", "--n", "8", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["n"] == 8 and len(payload["edges"]) == 12


def test_gen_stdout(capsys):
    assert main(["gen", "--kind", "krs", "--n", "6", "--r", "4", "--s", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["edges"]) == 15


def test_enumerate_prints_true_count(capsys):
    assert main(["enumerate", "--kind", "krs", "--r", "4", "--s", "2", "--n", "6"]) == 0
    captured = capsys.readouterr()
    assert captured.out.strip() == "1"
    assert "closed-form count 15" in captured.err


def test_enumerate_writes_dump(tmp_path, capsys):
    out = tmp_path / "fam.txt"
    assert main(["enumerate", "--kind", "c4e", "--n", "6", "--out", str(out)]) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "6 9 60" and len(lines) == 61


def test_enumerate_budget_refusal(capsys):
    rc = main(["enumerate", "--kind", "c4e", "--n", "12", "--budget", "1000"])
    assert rc == 1
    assert "required budget" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--kind", "nope", "--n", "8"])
    assert exc.value.code == 2


def test_invalid_parameters_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--kind", "krs", "--n", "5", "--r", "4", "--s", "2"])
    assert exc.value.code == 2


def test_density_pass(capsys):
    rc = main(["density", "--claim", "segment-edges", "--kind", "krs",
               "--r", "4", "--s", "2", "--n", "24"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "pass"


def test_spread_verdict_exit_codes(tmp_path, capsys):
    ok = main(["spread", "--kind", "c4e", "--n", "8", "--q", "1.0",
               "--alpha", "0.3333", "--delta", "0.0667"])
    assert ok == 0
    capsys.readouterr()
    bad = main(["spread", "--kind", "c4e", "--n", "8", "--q", "0.01",
                "--alpha", "0.3333", "--delta", "0.0667"])
    assert bad == 1


def test_spread_measure_constant(capsys):
    rc = main(["spread", "--kind", "c4e", "--n", "8", "--measure-constant",
               "--alpha", "0.333333", "--delta", "0.066667", "--exponent", "-0.666667"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert 0 < payload["minimal_constant"] < 250


def test_fragment_report(tmp_path):
    out = tmp_path / "frag.json"
    rc = main(["fragment", "--kind", "c4e", "--n", "8", "--w", "14", "--k", "5",
               "--trials", "20", "--seed", "3", "--round-constant", "4",
               "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["trials"] == 20 and payload["companion_bound"] > 0


def test_pipeline_runs_and_transcript(tmp_path, capsys):
    transcript = tmp_path / "runs.jsonl"
    rc = main(["pipeline", "--kind", "c4e", "--n", "8", "--K", "8",
               "--alpha", "0.3334", "--q", "0.5", "--seed", "5", "--runs", "3",
               "--transcript", str(transcript)])
    assert rc == 0
    assert capsys.readouterr().out.strip().endswith("/3")
    lines = transcript.read_text().strip().split("\n")
    assert all(json.loads(line) for line in lines)


def test_threshold_outputs_and_determinism(tmp_path):
    args = ["threshold", "--kind", "c4e", "--n", "8", "--grid", "0.5,0.7",
            "--trials", "15", "--seed", "4", "--workers", "1"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--csv", str(out1), "--json-out", str(tmp_path / "a.json")]) == 0
    assert main(args + ["--csv", str(out2), "--json-out", str(tmp_path / "b.json")]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    payload = json.loads((tmp_path / "a.json").read_text())
    assert payload["config"]["seed"] == 4


def test_threshold_svg(tmp_path):
    svg = tmp_path / "curve.svg"
    rc = main(["threshold", "--kind", "c4e", "--n", "8", "--grid", "0.5,0.8",
               "--trials", "5", "--seed", "1", "--workers", "1", "--svg", str(svg)])
    assert rc == 0
    head = svg.read_text()[:512]
    assert "<svg" in head or head.startswith("<?xml")
