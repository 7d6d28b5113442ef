import json

import pytest

from app.circuit import Circuit, Gate, permutation_table
from app.cli import main
from app.exceptions import EXIT_DETECTED, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE
from app.injection import record_from_document
from app.realfmt import parse_real, read_circuit, write_real
from app.schemas import InjectionRecordDocument, SummaryDocument, TrialOutcomeDocument
from tests.helpers import make_circuit


@pytest.fixture
def circuit_file(tmp_path):
    path = tmp_path / "golden.real"
    path.write_text(write_real(make_circuit(6, 40, seed=5)), encoding="utf-8")
    return path


def test_gen_empty_body(tmp_path):
    out = tmp_path / "c.real"
    assert main(["gen", "--lines", "4", "--gates", "0", "--seed", "1", "-o", str(out)]) == EXIT_OK
    doc = parse_real(out.read_text())
    assert doc.numvars == 4
    assert doc.gates == ()


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.real", tmp_path / "b.real"
    for path in (a, b):
        main(["gen", "--lines", "7", "--gates", "30", "--seed", "99", "--policy", "1:3", "-o", str(path)])
    assert a.read_bytes() == b.read_bytes()
    assert all(1 <= len(g.controls) <= 3 for g in read_circuit(a).gates)


def test_gen_default_gate_count(capsys):
    assert main(["gen", "--lines", "3", "--seed", "1"]) == EXIT_OK
    assert len(parse_real(capsys.readouterr().out).gates) == 90


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--lines", "0", "--seed", "1"],
        ["gen", "--lines", "4"],
        ["gen", "--lines", "4", "--seed", "-3"],
        ["gen", "--lines", "4", "--seed", "1", "--policy", "3"],
        ["gen", "--lines", "65", "--seed", "1"],
        ["gen", "--lines", "4", "--seed", "1", "--policy", "0:9"],
        ["gen", "--lines", "1", "--seed", "1", "--policy", "1:1"],
        ["bound", "--k", "3"],
        ["nope"],
        [],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_gen_accepts_widest_circuit_and_tight_policy(capsys):
    assert main(["gen", "--lines", "64", "--gates", "5", "--seed", "1"]) == EXIT_OK
    assert parse_real(capsys.readouterr().out).numvars == 64
    assert main(["gen", "--lines", "4", "--gates", "5", "--seed", "1", "--policy", "3:3"]) == EXIT_OK
    assert all(len(g.controls) == 3 for g in parse_real(capsys.readouterr().out).gates)


def test_help_is_not_an_error():
    assert main(["--help"]) == EXIT_OK


def test_check_equal_files(circuit_file, capsys):
    code = main(["check", "--golden", str(circuit_file), "--candidate", str(circuit_file), "--seed", "3", "--max-trials", "50"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "status: exhausted" in out
    assert "trials_used: 50" in out


def test_check_detects_injected_not(circuit_file, tmp_path, capsys):
    corrupted = tmp_path / "bad.real"
    assert main(["inject", "--circuit", str(circuit_file), "--k", "1", "--seed", "4", "-o", str(corrupted)]) == EXIT_OK
    code = main(["check", "--golden", str(circuit_file), "--candidate", str(corrupted), "--seed", "3", "--json"])
    assert code == EXIT_DETECTED
    outcome = TrialOutcomeDocument.model_validate_json(capsys.readouterr().out.strip().splitlines()[-1])
    assert outcome.status == "detected"
    assert outcome.trials_used == 1
    assert len(outcome.witness) == 6


def test_check_missing_file(circuit_file, tmp_path):
    code = main(["check", "--golden", str(circuit_file), "--candidate", str(tmp_path / "none.real"), "--seed", "1"])
    assert code == EXIT_RUNTIME


def test_check_parse_error(circuit_file, tmp_path):
    broken = tmp_path / "broken.real"
    broken.write_text(".numvars 1\n.variables a\n.begin\nt2 a\n.end\n")
    assert main(["check", "--golden", str(circuit_file), "--candidate", str(broken), "--seed", "1"]) == EXIT_RUNTIME


def test_inject_count_zero_keeps_circuit(circuit_file, tmp_path):
    out = tmp_path / "same.real"
    assert main(["inject", "--circuit", str(circuit_file), "--k", "2", "--count", "0", "--seed", "1", "-o", str(out)]) == EXIT_OK
    assert out.read_text() == circuit_file.read_text()


def test_inject_random_k1_is_not(circuit_file, tmp_path):
    out, rec = tmp_path / "bad.real", tmp_path / "rec.json"
    argv = ["inject", "--circuit", str(circuit_file), "--k", "1", "--kind", "random", "--seed", "8", "-o", str(out), "--record", str(rec)]
    assert main(argv) == EXIT_OK
    record = record_from_document(InjectionRecordDocument.model_validate_json(rec.read_text()))
    (error,) = record.errors
    (start, _), = record.windows
    assert permutation_table(error) == permutation_table(Circuit(6, (Gate(start),)))


def test_replay_reconstructs_bytes(circuit_file, tmp_path):
    out, rec, again = tmp_path / "bad.real", tmp_path / "rec.json", tmp_path / "again.real"
    argv = ["inject", "--circuit", str(circuit_file), "--k", "3", "--count", "4", "--kind", "random", "--seed", "2"]
    assert main(argv + ["-o", str(out), "--record", str(rec)]) == EXIT_OK
    assert main(["replay", "--circuit", str(circuit_file), "--record", str(rec), "-o", str(again)]) == EXIT_OK
    assert again.read_bytes() == out.read_bytes()
    assert json.loads(rec.read_text())["schema_version"] == 1


def test_inject_k_too_large(circuit_file, tmp_path):
    assert main(["inject", "--circuit", str(circuit_file), "--k", "7", "--seed", "1", "-o", str(tmp_path / "x.real")]) == EXIT_RUNTIME


def test_oracle_prints_fraction(circuit_file, tmp_path, capsys):
    out = tmp_path / "bad.real"
    main(["inject", "--circuit", str(circuit_file), "--k", "3", "--seed", "6", "-o", str(out)])
    capsys.readouterr()
    assert main(["oracle", "--golden", str(circuit_file), "--candidate", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == "16 / 64\n"


def test_oracle_capacity(tmp_path):
    big = tmp_path / "big.real"
    main(["gen", "--lines", "24", "--gates", "10", "--seed", "1", "-o", str(big)])
    assert main(["oracle", "--golden", str(big), "--candidate", str(big)]) == EXIT_RUNTIME


def test_bound(capsys):
    assert main(["bound", "--k", "3", "--delta", "0.05"]) == EXIT_OK
    assert capsys.readouterr().out == "12\n"
    assert main(["bound", "--k", "3", "--delta", "1.5"]) == EXIT_RUNTIME


def test_bound_json(capsys):
    main(["bound", "--k", "5", "--delta", "0.01", "--json"])
    assert json.loads(capsys.readouterr().out)["required_inputs"] == 74


def test_demo_masking(capsys):
    assert main(["demo", "masking"]) == EXIT_OK
    assert capsys.readouterr().out == "4 / 256\n"
    main(["demo", "masking", "--layer", "3"])
    assert capsys.readouterr().out == "256 / 256\n"
    assert main(["demo", "masking", "--layer", "5"]) == EXIT_RUNTIME


def test_demo_worstcase(capsys):
    assert main(["demo", "worstcase", "--lines", "6"]) == EXIT_OK
    assert capsys.readouterr().out == "4 / 64\nsupport: 1 2 3 4 5 (size 5)\n"


def test_demo_json(capsys):
    main(["demo", "worstcase", "--lines", "4", "--json"])
    assert json.loads(capsys.readouterr().out) == {"detecting": 4, "total": 16, "support": [1, 2, 3]}


def test_campaign_and_summarize(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "experiment": "multi_error", "n_values": [6], "gate_count": 20,
        "k_values": [2], "l_values": [1, 2], "repetitions": 10, "master_seed": 7,
    }))
    results, summary = tmp_path / "results.csv", tmp_path / "summary.json"
    argv = ["campaign", "--config", str(config), "-o", str(results)]
    assert main(argv) == EXIT_OK
    first = results.read_bytes()
    assert main(argv) == EXIT_OK
    assert results.read_bytes() == first
    assert len(first.splitlines()) == 1 + 2 * 10

    assert main(["summarize", "--results", str(results), "--format", "json", "-o", str(summary)]) == EXIT_OK
    doc = SummaryDocument.model_validate_json(summary.read_text())
    assert [(g.k, g.l, g.samples) for g in doc.groups] == [(2, 1, 10), (2, 2, 10)]
    assert main(["summarize", "--results", str(results)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("n,k,l,error_kind")


def test_campaign_invalid_config(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"experiment": "multi_error", "n_values": [4], "k_values": [5], "master_seed": 1}))
    assert main(["campaign", "--config", str(config), "-o", str(tmp_path / "r.csv")]) == EXIT_RUNTIME


@pytest.mark.parametrize("name", ["record", "outcome", "config", "results", "summary"])
def test_schema(name, capsys):
    assert main(["schema", name]) == EXIT_OK
    assert "properties" in json.loads(capsys.readouterr().out)
