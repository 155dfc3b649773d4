"""Integration tests for CLI commands."""

import pytest
import yaml
from click.testing import CliRunner

from fbpinn_gn.cli.main import cli
from fbpinn_gn.domain.decomposition import DecompositionError
from fbpinn_gn.lib.config.run_config import PRESET_NAMES
from fbpinn_gn.services.experiment import ExperimentRunner
from fbpinn_gn.storage.artifacts import HISTORY_FILE, REPORT_FILE, read_history


@pytest.fixture
def cli_runner():
    """Create a Click CLI test runner."""
    return CliRunner()


@pytest.fixture
def config_file(tmp_path, small_run_dict):
    """Small 1D Gauss-Newton config written as YAML."""
    path = tmp_path / "small.yaml"
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(small_run_dict, f)
    return path


@pytest.fixture
def vanilla_file(tmp_path, small_run_dict):
    """Single-network config written as YAML."""
    small_run_dict["model"] = {"kind": "vanilla", "layer_sizes": [1, 5, 1]}
    path = tmp_path / "vanilla.yaml"
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(small_run_dict, f)
    return path


@pytest.mark.integration
class TestCliBasics:
    """Test CLI help and version output."""

    def test_help(self, cli_runner):
        """Test that all commands are listed."""
        result = cli_runner.invoke(cli, ["--help"])

        assert result.exit_code == 0
        for command in ("run", "gram", "sweep", "decomp", "presets"):
            assert command in result.output

    def test_version(self, cli_runner):
        """Test the --version flag."""
        result = cli_runner.invoke(cli, ["--version"])

        assert result.exit_code == 0
        assert "fbpinn-gn" in result.output
        assert "0.1.0" in result.output


@pytest.mark.integration
class TestPresetsCommand:
    """Test the presets command."""

    def test_list(self, cli_runner):
        """Test every preset is listed."""
        result = cli_runner.invoke(cli, ["presets"])

        assert result.exit_code == 0
        assert "Available Presets" in result.output
        for name in PRESET_NAMES:
            assert name in result.output

    def test_show_preset(self, cli_runner):
        """Test a preset is printed as loadable YAML."""
        result = cli_runner.invoke(cli, ["presets", "table1_gn"])

        assert result.exit_code == 0
        data = yaml.safe_load(result.output)
        assert data["problem"]["name"] == "ode1d_hf"
        assert data["model"]["subdomains"] == 24

    def test_unknown_preset(self, cli_runner):
        """Test unknown names exit with an error."""
        result = cli_runner.invoke(cli, ["presets", "table3"])

        assert result.exit_code == 1
        assert "Unknown preset" in result.output

    def test_write(self, cli_runner, tmp_path):
        """Test --write creates one YAML file per preset."""
        target = tmp_path / "presets"
        result = cli_runner.invoke(cli, ["presets", "--write", str(target)])

        assert result.exit_code == 0
        assert sorted(p.stem for p in target.glob("*.yaml")) == sorted(PRESET_NAMES)


@pytest.mark.integration
class TestRunCommand:
    """Test the run command."""

    def test_run_from_yaml(self, cli_runner, config_file, tmp_path):
        """Test a small run completes and writes its artifacts."""
        out = tmp_path / "run"
        result = cli_runner.invoke(cli, ["run", str(config_file), "--out", str(out)])

        assert result.exit_code == 0, result.output
        assert "✓ Run completed successfully!" in result.output
        assert "Relative L2 error" in result.output
        assert (out / HISTORY_FILE).exists()
        assert (out / REPORT_FILE).exists()

    def test_overrides(self, cli_runner, config_file, tmp_path):
        """Test --seed and --max-iters reach the run."""
        out = tmp_path / "run"
        result = cli_runner.invoke(
            cli, ["run", str(config_file), "--out", str(out), "--seed", "5", "--max-iters", "1"]
        )

        assert result.exit_code == 0, result.output
        assert "Seed: 5" in result.output
        assert len(read_history(out / HISTORY_FILE)) == 2
        assert yaml.safe_load((out / "config.yaml").read_text())["init"]["seed"] == 5

    def test_invalid_config(self, cli_runner, tmp_path, small_run_dict):
        """Test validation errors exit with status 1."""
        small_run_dict["optimizer"]["method"] = "lbfgs"
        path = tmp_path / "bad.yaml"
        path.write_text(yaml.safe_dump(small_run_dict))

        result = cli_runner.invoke(cli, ["run", str(path), "--out", str(tmp_path / "run")])

        assert result.exit_code == 1
        assert "✗ Invalid configuration" in result.output
        assert "optimizer.method" in result.output

    def test_missing_config(self, cli_runner, tmp_path):
        """Test a path that is neither a file nor a preset."""
        result = cli_runner.invoke(cli, ["run", str(tmp_path / "nope.yaml")])

        assert result.exit_code == 1
        assert "no preset of that name" in result.output


@pytest.mark.integration
class TestGramCommand:
    """Test the gram command."""

    def test_export(self, cli_runner, config_file, tmp_path):
        """Test the pattern files and summary."""
        out = tmp_path / "gram"
        result = cli_runner.invoke(cli, ["gram", str(config_file), "--out", str(out)])

        assert result.exit_code == 0, result.output
        assert "Parameters: 64 in 4 blocks" in result.output
        assert "✓ Pattern exported!" in result.output
        assert (out / "gram_pattern.txt").exists()
        assert (out / "gram_blocks.txt").exists()


@pytest.mark.integration
class TestDecompCommand:
    """Test the decomp command."""

    def test_print_bounds(self, cli_runner, config_file):
        """Test subdomain count and one row per subdomain."""
        result = cli_runner.invoke(cli, ["decomp", str(config_file)])

        assert result.exit_code == 0, result.output
        assert "Subdomains: 4" in result.output
        assert sum(line.strip().startswith("k=") for line in result.output.splitlines()) == 4

    def test_write_windows(self, cli_runner, config_file, tmp_path):
        """Test --out writes the window tables."""
        out = tmp_path / "decomp"
        result = cli_runner.invoke(cli, ["decomp", str(config_file), "--out", str(out)])

        assert result.exit_code == 0, result.output
        assert "✓ Windows written to" in result.output
        assert (out / "windows.csv").exists()
        assert (out / "decomposition.csv").exists()

    def test_vanilla_rejected(self, cli_runner, vanilla_file):
        """Test single-network configs have no decomposition."""
        result = cli_runner.invoke(cli, ["decomp", str(vanilla_file)])

        assert result.exit_code == 1
        assert "no decomposition" in result.output

    def test_decomposition_error_reported(self, cli_runner, config_file, mocker):
        """Test a failure while building the decomposition exits cleanly."""
        mocker.patch(
            "fbpinn_gn.cli.main.build_decomposition",
            side_effect=DecompositionError("overlap leaves a gap"),
        )

        result = cli_runner.invoke(cli, ["decomp", str(config_file)])

        assert result.exit_code == 1
        assert "✗ Decomposition failed: overlap leaves a gap" in result.output


@pytest.mark.integration
class TestSweepCommand:
    """Test the sweep command."""

    def test_two_seeds(self, cli_runner, config_file, tmp_path):
        """Test per-seed runs and the summary files."""
        out = tmp_path / "sweep"
        result = cli_runner.invoke(cli, ["sweep", str(config_file), "--seeds", "2", "--out", str(out)])

        assert result.exit_code == 0, result.output
        assert "Median error:" in result.output
        assert "Reached tolerance: 0/2" in result.output
        assert "✓ Sweep completed successfully!" in result.output
        assert (out / "seed_0" / HISTORY_FILE).exists()
        assert (out / "seed_1" / HISTORY_FILE).exists()
        assert yaml.safe_load((out / "sweep.yaml").read_text())["n_runs"] == 2

    def test_zero_seeds(self, cli_runner, config_file, tmp_path):
        """Test a non-positive seed count is rejected before any run starts."""
        result = cli_runner.invoke(cli, ["sweep", str(config_file), "--seeds", "0", "--out", str(tmp_path)])

        assert result.exit_code == 2
        assert "--seeds" in result.output
        assert not (tmp_path / "seed_0").exists()

    def test_training_value_error_not_reported_as_config_error(self, cli_runner, config_file, tmp_path, mocker):
        """Test numerical failures during the sweep are reported as sweep failures."""
        mocker.patch.object(ExperimentRunner, "sweep", side_effect=ValueError("matrix is not positive definite"))

        result = cli_runner.invoke(cli, ["sweep", str(config_file), "--seeds", "2", "--out", str(tmp_path)])

        assert result.exit_code == 1
        assert "✗ Sweep failed: matrix is not positive definite" in result.output
        assert "Invalid configuration" not in result.output
