"""Config parsing, command dispatch, report round-trips, and exit codes.

Core claims:
    - the carpet and sofic configs parse; malformed ones raise with a path
    - dimension/entropy/estimate/variational reports carry the documented
      fields and warnings
    - re-running on a report's echoed config reproduces the JSON bit for bit
    - exit codes: 0 ok, 1 validation, 2 computation, 3 failed invariants
"""
import json
import os

import pytest

from wtp.cli import main, parse_config, run
from wtp.errors import ParseError, UnsupportedCombination
from wtp.sofic import golden_mean_chain

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


def _carpet_config():
    return {
        "system": {"sponge": {"bases": [2, 3], "digits": [[0, 0], [1, 1], [0, 2]]}},
        "exponents": "from-bases",
    }


def _golden_config():
    chain = golden_mean_chain()
    return {
        "system": {
            "sofic": {
                "bases": [2, 3, 4],
                "vertices": list(chain.graph.vertices),
                "edges": [[s, t, list(lab)] for s, t, lab in chain.graph.edges],
            }
        },
        "exponents": "from-bases",
    }


def test_carpet_config_parses():
    config = parse_config(_carpet_config())
    assert config.chain.rank == 2
    assert config.n_max == 12
    assert config.budget == 10**7


def test_golden_config_parses():
    config = parse_config(_golden_config())
    assert config.chain.rank == 3
    assert len(config.chain.graph.edges) == 26


def test_shipped_configs_parse():
    for name in ("carpet.json", "golden_sofic.json", "carpet_pressure.json"):
        with open(os.path.join(CONFIG_DIR, name)) as fh:
            parse_config(fh.read())


def test_exponent_length_validated():
    doc = _carpet_config()
    doc["exponents"] = [0.5, 0.5]
    with pytest.raises(ParseError):
        parse_config(doc)


def test_two_system_variants_rejected():
    doc = _carpet_config()
    doc["system"]["sofic"] = {}
    with pytest.raises(ParseError):
        parse_config(doc)


def test_invalid_json_rejected():
    with pytest.raises(ParseError):
        parse_config("{not json")


def test_dimension_on_carpet():
    report = run(parse_config(_carpet_config()), "dimension")
    cf = report.closed_form
    assert cf["hausdorff_dimension"] == pytest.approx(1.349, abs=1e-3)
    assert cf["minkowski_dimension"] == pytest.approx(1.369, abs=1e-3)
    assert report.warnings == []


def test_entropy_on_golden_chain():
    report = run(parse_config(_golden_config()), "entropy")
    assert report.closed_form["h_a_nats"] == pytest.approx(1.4598, abs=5e-5)
    assert report.closed_form["h_over_log_m1"] == pytest.approx(2.1062, abs=1e-3)
    assert any("ambiguity" in w for w in report.warnings)


def test_dimension_on_golden_chain_reports_both():
    report = run(parse_config(_golden_config()), "dimension")
    assert report.closed_form["h_a_nats"] == pytest.approx(1.4598, abs=5e-5)
    assert report.closed_form["h_over_log_m1"] == pytest.approx(2.1062, abs=1e-3)
    assert any("ambiguity" in w for w in report.warnings)


def test_estimate_series_matches_library():
    from wtp.estimator import entropy_estimate
    from wtp.weights import exponents_from_bases

    doc = _golden_config()
    doc["estimator"] = {"n_max": 5}
    report = run(parse_config(doc), "estimate")
    chain = golden_mean_chain()
    series = entropy_estimate(chain, exponents_from_bases((2, 3, 4)), n_max=5)
    got = [row["log_s_over_n"] for row in report.estimate_series]
    assert got == [v for _n, v in series.entries]
    feketes = [row["fekete_bound"] for row in report.estimate_series]
    assert feketes == series.fekete_bounds


def test_variational_on_carpet():
    report = run(parse_config(_carpet_config()), "variational")
    assert abs(report.variational["gap_to_closed_form"]) <= 1e-6
    assert report.variational["value"] == pytest.approx(
        report.closed_form["h_a_nats"], abs=1e-6
    )


def test_variational_on_sofic_rejected():
    with pytest.raises(UnsupportedCombination):
        run(parse_config(_golden_config()), "variational")


def test_report_roundtrip_is_bit_stable():
    config = parse_config(_carpet_config())
    first = run(config, "dimension")
    echoed = first.to_dict()["provenance"]["config"]
    second = run(parse_config(json.loads(json.dumps(echoed))), "dimension")
    assert first.to_json() == second.to_json()


def test_cli_main_json(tmp_path, capsys):
    path = tmp_path / "carpet.json"
    path.write_text(json.dumps(_carpet_config()))
    code = main(["dimension", "--config", str(path)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["closed_form"]["hausdorff_dimension"] == pytest.approx(1.349, abs=1e-3)


def test_cli_main_table_format(tmp_path, capsys):
    path = tmp_path / "carpet.json"
    config = _carpet_config()
    config["estimator"] = {"n_max": 3}
    path.write_text(json.dumps(config))
    code = main(["estimate", "--config", str(path), "--format", "table"])
    assert code == 0
    out = capsys.readouterr().out
    assert "log S_N / N" in out
    assert "fekete bound" in out


def test_cli_missing_config_is_validation_error(capsys):
    assert main(["entropy", "--config", "/nonexistent.json"]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_bad_config_is_validation_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"system": {}}')
    assert main(["entropy", "--config", str(path)]) == 1


def test_cli_budget_env_triggers_computation_error(tmp_path, capsys, monkeypatch):
    path = tmp_path / "golden.json"
    path.write_text(json.dumps(_golden_config()))
    monkeypatch.setenv("WTP_BUDGET", "100")
    assert main(["estimate", "--config", str(path)]) == 2
    assert "budget" in capsys.readouterr().err


def test_cli_n_max_flag_overrides(tmp_path, capsys):
    path = tmp_path / "golden.json"
    path.write_text(json.dumps(_golden_config()))
    code = main(["estimate", "--config", str(path), "--n-max", "2"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert [row["n"] for row in out["estimate_series"]] == [1, 2]


def test_cli_check_failure_exit_code(tmp_path, capsys, monkeypatch):
    import wtp.cli as cli_module
    from wtp.checks import CheckResult

    path = tmp_path / "carpet.json"
    path.write_text(json.dumps(_carpet_config()))
    monkeypatch.setattr(
        cli_module, "run_all_checks", lambda: [CheckResult("stub", False, "forced")]
    )
    assert main(["check", "--config", str(path)]) == 3


@pytest.mark.slow
def test_cli_check_passes(tmp_path, capsys):
    path = tmp_path / "carpet.json"
    path.write_text(json.dumps(_carpet_config()))
    code = main(["check", "--config", str(path)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert all(row["passed"] for row in out["checks"])
    assert len(out["checks"]) == 7