import json
import math

import numpy as np
import pandas as pd
import pytest

from main import main

HALF_PI = repr(math.pi / 2.0)
QUARTER_PI = repr(math.pi / 4.0)


def write_config(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_spectrum_csv(tmp_path):
    out = tmp_path / "spectrum.csv"
    assert main(["spectrum", "--theta", HALF_PI, "--cutoff", "2", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["index", "lambda", "multiplicity", "method"]
    np.testing.assert_allclose(frame["lambda"], [1.0 / 16.0, 9.0 / 16.0, 25.0 / 16.0], rtol=0., atol=1e-9)
    assert set(frame["method"]) == {"monodromy_roots"}


def test_spectrum_finite_difference(tmp_path):
    out = tmp_path / "fd.csv"
    assert main(["spectrum", "--theta", HALF_PI, "--cutoff", "1", "--method", "finite-difference",
                 "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert len(frame) == 2
    assert set(frame["method"]) == {"finite_difference"}


def test_maslov_json(tmp_path):
    out = tmp_path / "maslov.json"
    plot = tmp_path / "rectangle.svg"
    code = main(["maslov", "--theta1", QUARTER_PI, "--theta2", HALF_PI, "--r", "0.6",
                 "--backend", "crossing-form", "--out", str(out), "--plot", str(plot)])
    assert code == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["index"] == 2
    assert payload["half_index"] == 1.0
    assert len(payload["crossings"]) == 1
    assert plot.exists()


def test_verify_souriau(tmp_path, capsys):
    out = tmp_path / "verify.json"
    assert main(["verify", "--suite", "souriau", "--out", str(out)]) == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["exit_code"] == 0
    assert payload["reports"][0]["claim_id"] == "souriau_identity"
    assert "[verify] souriau: 1/1 passed" in capsys.readouterr().err


def test_bands_outputs(tmp_path):
    out = tmp_path / "bands.csv"
    assert main(["bands", "--k-max", "2", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    np.testing.assert_allclose(frame[["alpha_k", "beta_k"]].to_numpy(), [[0.0, 0.25], [0.25, 1.0]],
                               rtol=0., atol=1e-8)
    assert (tmp_path / "bands.svg").exists()


def test_curves_outputs(tmp_path):
    out = tmp_path / "curves.csv"
    assert main(["curves", "--branches", "0", "--theta-steps", "4", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert len(frame) == 5
    np.testing.assert_allclose(frame["lambda"], (frame["theta"] / (2.0 * math.pi)) ** 2, rtol=0., atol=1e-9)
    assert (tmp_path / "curves.svg").exists()


@pytest.mark.slow
def test_rescale_well(tmp_path):
    config = write_config(tmp_path / "well.json", {
        "potential": {"preset": "constant", "n": 1, "matrix": [[-5.0]], "interval": [-math.pi, math.pi]},
    })
    out = tmp_path / "rescale.json"
    assert main(["rescale", "--config", config, "--tau", "0.3", "--theta", "0", "--out", str(out)]) == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["count_diff"] == -4
    assert payload["mor_diff"] == 4
    assert payload["kernel_sum"] == 4
    assert payload["morse"]["hypothesis"] == "nonpositive"


@pytest.mark.parametrize("data", [
    {"potential": {"interval": [1.0, 0.0]}},
    {"potential": {"preset": "constant"}},
    {"numerics": {"fd_grid": 10}},
    {"threads": 0},
])
def test_invalid_config_exit_code(tmp_path, capsys, data):
    config = write_config(tmp_path / "bad.json", data)
    assert main(["spectrum", "--config", config, "--theta", "0", "--cutoff", "1"]) == 2
    assert "[error]" in capsys.readouterr().err


def test_unreadable_config(tmp_path):
    assert main(["spectrum", "--config", str(tmp_path / "missing.json"), "--theta", "0", "--cutoff", "1"]) == 2


def test_rescale_needs_symmetric_interval(tmp_path):
    assert main(["rescale", "--tau", "0.5", "--theta", "0"]) == 2
