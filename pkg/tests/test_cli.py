import json

import pytest
import yaml
from click.testing import CliRunner

from gencomplex.cli import EXIT_FAILURE, EXIT_INPUT, cli


@pytest.fixture()
def runner():
    return CliRunner()


def _json(result):
    return json.loads(result.stdout)


def test_verify_gcs_on_flat_torus(runner):
    result = runner.invoke(cli, ["verify-gcs", "(0,0,0,0,0,0)", "--spinor", "exp(i*(12+34+56))", "--json"])
    assert result.exit_code == 0, result.output
    verification = _json(result)["verification"]
    assert verification["type"] == 0
    assert verification["is_structure"]


def test_verify_gcs_text_output_is_yaml(runner):
    result = runner.invoke(cli, ["verify-gcs", "(0,0,0,0)", "--spinor", "(1+i2)(3+i4)"])
    assert result.exit_code == 0, result.output
    assert yaml.safe_load(result.stdout)["verification"]["type"] == 2


def test_non_integrable_spinor_exits_with_failure(runner):
    result = runner.invoke(cli, ["verify-gcs", "(0,0,0,12)", "--spinor", "exp(i(12+34))", "--json"])
    assert result.exit_code == EXIT_FAILURE
    assert not _json(result)["verification"]["integrable"]


def test_betti_numbers(runner):
    result = runner.invoke(cli, ["betti", "(0,0,12)", "--json"])
    assert result.exit_code == 0, result.output
    assert _json(result)["betti"] == [1, 2, 2, 1]


def test_malformed_algebra_is_an_input_error(runner):
    result = runner.invoke(cli, ["betti", "(0,0,12"])
    assert result.exit_code == EXIT_INPUT
    assert result.stdout == ""


def test_parse_rejects_non_lie_brackets(runner):
    result = runner.invoke(cli, ["parse", "(0,0,0,12,34)"])
    assert result.exit_code == EXIT_FAILURE


def test_lefschetz_kernels_on_heisenberg_square(runner):
    result = runner.invoke(cli, ["lefschetz", "(0,0,12,0,0,45)", "--omega", "14+23+56", "--json"])
    assert result.exit_code == EXIT_FAILURE
    levels = _json(result)["levels"]
    assert [level["kernel_dim"] for level in levels] == [0, 2, 1]


def test_lefschetz_existence_search(runner):
    result = runner.invoke(cli, ["lefschetz", "(0,0,0,0,0,12+34)", "--json"])
    assert result.exit_code == EXIT_FAILURE
    assert _json(result)["verdict"] == "impossible"


def test_ddlemma_needs_exactly_one_input(runner):
    result = runner.invoke(cli, ["ddlemma", "(0,0,0,0)"])
    assert result.exit_code == EXIT_INPUT
    result = runner.invoke(cli, ["ddlemma", "(0,0,0,0)", "--spinor", "exp(i(12+34))", "--omega", "12+34"])
    assert result.exit_code == EXIT_INPUT


def test_ddlemma_on_flat_torus(runner):
    result = runner.invoke(cli, ["ddlemma", "(0,0,0,0)", "--spinor", "exp(i(12+34))", "--json"])
    assert result.exit_code == 0, result.output
    assert _json(result)["lemma"]["holds"]


def test_sl2_check_with_phi_map(runner):
    result = runner.invoke(cli, ["sl2-check", "(0,0,0,12)", "--omega", "13+24", "--phi", "--json"])
    assert result.exit_code == 0, result.output
    report = _json(result)
    assert report["sl2"]["passes"]
    assert report["phi"]["d_identity"]


def test_massey_on_heisenberg(runner):
    result = runner.invoke(cli, ["massey", "(0,0,12)", "1", "2", "1", "--json"])
    assert result.exit_code == 0, result.output
    assert _json(result)["verdict"] == "nonvanishing"


def test_massey_against_needs_a_cdga(runner):
    result = runner.invoke(cli, ["massey", "(0,0,12)", "1", "2", "1", "--against", "3"])
    assert result.exit_code == EXIT_INPUT


def test_massey_pairing_on_a_cdga(runner, data_dir):
    path = str(data_dir / "cdga" / "sharp.json")
    result = runner.invoke(cli, ["massey", path, "v1", "v2", "v2", "--cdga", "--against", "v1", "--json"])
    assert result.exit_code == 0, result.output
    assert _json(result)["integral"] in ("1", "-1")


def test_minimal_model_with_formality_check(runner):
    result = runner.invoke(cli, ["minmodel", "(0,0,12)", "--degree", "3", "--formality", "3", "--json"])
    assert result.exit_code == 0, result.output
    report = _json(result)
    assert report["model"]["census"] == {"1": 3}
    assert report["formality"]["verdict"] == "nonformal"


def test_minimal_model_of_sphere_bundle(runner):
    result = runner.invoke(cli, ["minmodel", "1", "--sphere-bundle", "--degree", "2", "--json"])
    assert result.exit_code == 0, result.output
    assert _json(result)["cdga"]["betti"] == [1, 0, 2, 0, 0, 2, 0, 1]


def test_tdualize_kodaira_thurston(runner):
    result = runner.invoke(
        cli, ["tdualize", "(0,0,0,12)", "--circle", "4", "--verify", "--spinor", "exp(i(13+24))", "--json"]
    )
    assert result.exit_code == 0, result.output
    report = _json(result)
    assert report["dual"]["dual_algebra"] == "(0,0,0,0)"
    assert report["verification"]["passes"]
    assert report["transport"]["type_change"] == 1


def test_tdualize_rejects_a_missing_fiber(runner):
    result = runner.invoke(cli, ["tdualize", "(0,0,0,12)", "--circle", "7"])
    assert result.exit_code == EXIT_INPUT


def test_blowup_report(runner, data_dir):
    path = str(data_dir / "blowup" / "gil.json")
    result = runner.invoke(cli, ["blowup", path, "--eps", "1/8", "--massey", "1", "--massey", "2", "--massey", "1", "--json"])
    assert result.exit_code == 0, result.output
    report = _json(result)
    assert report["ring"]["blowup_betti"] == [1, 4, 9, 12, 9, 4, 1]
    assert report["lefschetz"]["generic_passes"]
    assert report["massey"]["survives"]


def test_blowup_rejects_bad_samples(runner, data_dir):
    path = str(data_dir / "blowup" / "cp2_point.json")
    result = runner.invoke(cli, ["blowup", path, "--eps", "x"])
    assert result.exit_code == EXIT_INPUT


def test_table_betti_only(runner, data_dir):
    result = runner.invoke(cli, ["table1", str(data_dir / "table1"), "--betti-only"])
    assert result.exit_code == 0, result.output
    assert "skipped" in result.stdout
    assert result.stdout.splitlines()[-1].startswith("rows=34")


def test_unknown_command_is_a_usage_error(runner):
    result = runner.invoke(cli, ["nonsense"])
    assert result.exit_code == EXIT_INPUT
