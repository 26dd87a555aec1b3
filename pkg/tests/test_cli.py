import json

import pytest
from click.testing import CliRunner

from dyncode import DynamicalCode, save_code, shor_code
from dyncode.cli import main, parse_error_spec
from dyncode.engine import ValidationError
from dyncode.pauli import parse_pauli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def shor_file(tmp_path):
    path = tmp_path / "shor.json"
    save_code(shor_code(), path)
    return str(path)


@pytest.fixture
def masked_shor_file(tmp_path):
    path = tmp_path / "shor-masked.json"
    save_code(shor_code(mask_z1z2=True), path)
    return str(path)


def run_json(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


class TestValidate:
    def test_clean_file(self, runner, shor_file):
        report = run_json(runner, ["validate", shor_file])
        assert report["diagnostics"] == []
        assert report["n"]["value"] == 9
        assert report["rounds"]["value"] == 1
        assert len(report["input_digest"]) == 64

    def test_malformed_file_exits_1(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 1

    def test_text_format(self, runner, shor_file):
        result = runner.invoke(
            main, ["validate", shor_file, "--format", "text"],
            catch_exceptions=False,
        )
        assert result.exit_code == 0
        assert "n: 9" in result.output


class TestClassify:
    def test_masked_shor(self, runner, masked_shor_file):
        report = run_json(runner, ["classify", masked_shor_file])
        assert report["temporarily_masked"] == ["ZZIIIIIII"]
        assert report["permanently_masked"] == []
        assert len(report["unmasked"]) == 7
        assert report["generator_tags"].count("unmasked") == 7

    def test_output_is_deterministic(self, runner, masked_shor_file):
        first = runner.invoke(main, ["classify", masked_shor_file])
        second = runner.invoke(main, ["classify", masked_shor_file])
        assert first.output == second.output

    def test_isg_round_shifts_the_start(self, runner, tmp_path):
        n = 6
        code = DynamicalCode.make(
            n,
            [parse_pauli(" ".join(f"X{i}" for i in range(1, 7)), n)],
            [
                [parse_pauli("X1 X2", n)],
                [parse_pauli("X3 X4", n)],
                [parse_pauli("X5 X6", n)],
            ],
        )
        path = tmp_path / "chain.json"
        save_code(code, path)
        report = run_json(runner, ["classify", str(path), "--isg-round", "1"])
        assert report["window"]["value"] == 2
        # The round-1 check itself is never remeasured, so of the shifted
        # initial group only the complementary chain is unmasked.
        assert len(report["unmasked"]) == 1
        assert report["unmasked"][0]["operator"] == "IIXXXX"
        assert report["temporarily_masked"] == ["XXXXXX"]


class TestDistance:
    def test_masked_shor_distances(self, runner, masked_shor_file):
        report = run_json(
            runner, ["distance", masked_shor_file, "--cap", "4"]
        )
        assert report["d_u"]["value"]["value"] == 2
        assert report["d_isg"]["value"]["value"] == 3
        assert report["t_destab_policy"] == "canonical"

    def test_cap_exceeded_status(self, runner, shor_file):
        report = run_json(runner, ["distance", shor_file, "--cap", "2"])
        assert report["d_isg"]["status"] == "exceeded-cap"


class TestFloquet:
    def test_chain_report(self, runner, tmp_path):
        from dyncode import build_1d_chain

        path = tmp_path / "chain.json"
        save_code(build_1d_chain(6), path)
        report = run_json(runner, ["floquet", str(path)])
        assert report["monotonicity_violations"] == []
        assert report["growth_violations"] == []
        assert report["initialization_depth"]["value"] >= 1

    def test_unsettled_syndromes_exit_2(self, runner, tmp_path):
        code = DynamicalCode.make(
            2, [parse_pauli("Z1", 2)], [[parse_pauli("Z2", 2)]]
        )
        path = tmp_path / "stuck.json"
        save_code(code, path)
        result = runner.invoke(main, ["floquet", str(path)])
        assert result.exit_code == 2


class TestSimulate:
    def test_error_injection(self, runner, shor_file):
        report = run_json(
            runner, ["simulate", shor_file, "--errors", "0:X1"]
        )
        assert report["errors"] == {"0": "XIIIIIIII"}
        flips = {
            entry["stabilizer"]: entry["flip"]["value"]
            for entry in report["syndromes"]
        }
        # The classifier reports the unmasked group in a reduced basis;
        # X on qubit 1 flips exactly the entry touching Z1.
        assert flips["ZIZIIIIII"] == 1
        assert flips["IZZIIIIII"] == 0
        assert report["decoding"]["ok"] is True
        for entry in report["logical_outcomes"]:
            assert entry["status"] == "ok"
            assert entry["agree"] is True

    def test_round_out_of_range_exits_1(self, runner, shor_file):
        result = runner.invoke(main, ["simulate", shor_file, "--errors", "9:X1"])
        assert result.exit_code == 1

    def test_bad_error_spec(self, runner, shor_file):
        result = runner.invoke(main, ["simulate", shor_file, "--errors", "X1"])
        assert result.exit_code == 1

    def test_parse_error_spec(self):
        errors = parse_error_spec("0:X1,2:Z1 Z2", 3)
        assert errors == {
            0: parse_pauli("X1", 3),
            2: parse_pauli("Z1 Z2", 3),
        }
        assert parse_error_spec("", 3) == {}
        with pytest.raises(ValidationError):
            parse_error_spec("one:X1", 3)
