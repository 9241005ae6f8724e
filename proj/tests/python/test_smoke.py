import json
import os
import subprocess

import mpmath as mp
import numpy as np
import pytest

import msfbm

CLI = os.environ.get("MSFBM_CLI")
SCHEMAS = os.environ.get("MSFBM_SCHEMAS", os.path.join(os.path.dirname(__file__), "..", "..", "schemas"))

mp.mp.dps = 50


def oracle_cov(coeffs, hurst, s, t):
    s, t = mp.mpf(s), mp.mpf(t)
    total = mp.mpf(0)
    for a, h in zip(coeffs, hurst):
        e = 2 * mp.mpf(h)
        total += mp.mpf(a) ** 2 * (s**e + t**e - (mp.power(s + t, e) + mp.power(abs(t - s), e)) / 2)
    return total


def rel_err(a, b, scale=1e-300):
    return abs(a - b) / max(abs(a), abs(b), scale)


# Bindings


@pytest.mark.parametrize("coeffs,hurst", [([1.0], [0.75]), ([1.0, -0.5], [0.3, 0.9]), ([2.0, 1.0, 0.5], [0.1, 0.5, 0.95])])
@pytest.mark.parametrize("s,t", [(0.5, 1.0), (1.0, 2.0), (3.0, 3.0), (1e-3, 7.0)])
def test_cov_matches_oracle(coeffs, hurst, s, t):
    spec = msfbm.ProcessSpec(coeffs, hurst)
    value = msfbm.msfbm_cov(spec, s, t)
    expected = float(oracle_cov(coeffs, hurst, s, t))
    assert rel_err(value, expected, 1e-300) <= 1e-12


def test_gram_matrix_is_symmetric_and_matches_kernel():
    spec = msfbm.ProcessSpec([1.0, 0.5], [0.3, 0.8])
    times = [0.0, 0.4, 0.9, 1.3]
    g = np.asarray(msfbm.gram_matrix(spec, times))
    # t = 0 carries no variance and is excluded from the matrix
    assert g.shape == (3, 3)
    assert np.array_equal(g, g.T)
    assert g[0, 1] == pytest.approx(msfbm.msfbm_cov(spec, 0.4, 0.9), rel=1e-15)


def test_invalid_spec_raises_value_error():
    with pytest.raises(ValueError):
        msfbm.ProcessSpec([1.0], [1.0])
    with pytest.raises(msfbm.ValidationError):
        msfbm.ProcessSpec([1.0, 2.0], [0.5])


def test_sample_ensemble_is_reproducible():
    spec = msfbm.ProcessSpec([1.0, 1.0], [0.3, 0.8])
    times = msfbm.uniform_grid(17, 1.0)
    a = msfbm.sample_ensemble(spec, times, 5, 42, threads=1)
    b = msfbm.sample_ensemble(spec, times, 5, 42, threads=3)
    assert a["values"].shape == (5, 17)
    assert np.array_equal(a["values"], b["values"])
    assert np.all(a["values"][:, 0] == 0.0)
    assert a["method"] == "exact"
    c = msfbm.sample_ensemble(spec, times, 5, 43)
    assert not np.array_equal(a["values"], c["values"])


def test_classification():
    v = msfbm.semimartingale_classify(msfbm.ProcessSpec([1.0, 1.0], [0.5, 0.8]))
    assert v == {"is_semimartingale": True, "witness": 0, "reason": "HalfWitnessAndRest"}
    v = msfbm.semimartingale_classify(msfbm.ProcessSpec([1.0, 1.0], [0.5, 0.7]))
    assert v["is_semimartingale"] is False and v["witness"] is None
    assert msfbm.markov_verdict(msfbm.ProcessSpec([1.0, 2.0], [0.5, 0.5]))
    assert not msfbm.markov_verdict(msfbm.ProcessSpec([1.0], [0.6]))
    assert msfbm.increment_sign_predict(msfbm.ProcessSpec([1.0, 1.0], [0.2, 0.4])) == "Negative"
    assert msfbm.dependence_compare(msfbm.ProcessSpec([1.0], [0.8]), 0, 1.0, 2.0, 0, 1, 1, 2) == "Greater"
    with pytest.raises(msfbm.PreconditionViolated):
        msfbm.dependence_compare(msfbm.ProcessSpec([1.0], [0.8]), 0, 3.0, 2.0, 0, 1, 1, 2)


def test_srd_partial_sums_increase_for_short_memory():
    sums = msfbm.srd_partial_sums(msfbm.ProcessSpec([1.0], [0.75]), 1, 50)
    assert len(sums) == 50
    assert all(b > a for a, b in zip(sums, sums[1:]))


def test_holder_estimate_on_ensemble():
    spec = msfbm.ProcessSpec([1.0], [0.7])
    times = msfbm.uniform_grid(257, 1.0)
    ens = msfbm.sample_ensemble(spec, times, 200, 9)
    h, se = msfbm.holder_exponent_estimate(times, ens["values"])
    assert abs(h - 0.7) < 0.05
    assert se > 0


def test_verify_returns_report():
    report = msfbm.verify("kernels")
    assert report["schema"] == "msfbm.verify/1"
    assert report["passed"] is True
    with pytest.raises(ValueError):
        msfbm.verify("nope")


# CLI

needs_cli = pytest.mark.skipif(not CLI, reason="command-line tool not built")


def run(*args, check=True):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    if check:
        assert proc.returncode == 0, proc.stderr
    return proc


def validate(name, document):
    jsonschema = pytest.importorskip("jsonschema")
    with open(os.path.join(SCHEMAS, f"{name}.schema.json")) as fh:
        schema = json.load(fh)
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.Draft202012Validator(schema).validate(document)


@needs_cli
def test_cli_cov_golden():
    assert run("cov", "--coeffs", "1", "--hurst", "0.5", "--points", "1,2").stdout == "1,2,1.0\n"
    assert run("cov", "--hurst", "0.75", "--points", "1,2").stdout == "1,2,0.73035091339287417\n"


@needs_cli
def test_cli_cov_json_schema():
    doc = json.loads(run("cov", "--hurst", "0.75", "--points", "1,2,0.5,3", "--format", "json").stdout)
    validate("cov", doc)
    assert len(doc["rows"]) == 2


@needs_cli
def test_cli_exit_codes():
    assert run("cov", "--hurst", "1.0", "--points", "1,2", check=False).returncode == 2
    assert run("cov", "--hurst", "0.5", "--points", "1,2", "--coeffs", "1,2", check=False).returncode == 2
    assert run("simulate", "--hurst", "0.5", "--bogus", check=False).returncode == 2
    assert run("dims", "--hurst", "0.5", "--grid-points", "1025", check=False).returncode == 2


@needs_cli
def test_cli_simulate_is_byte_identical_across_threads(tmp_path):
    args = ["simulate", "--hurst", "0.3,0.8", "--coeffs", "1,-0.5", "--grid-points", "65", "--reps", "20", "--seed", "11"]
    one = run(*args, "--threads", "1").stdout
    four = run(*args, "--threads", "4").stdout
    assert one == four
    assert "# master_seed=11" in one
    out = tmp_path / "paths.json"
    run(*args, "--format", "json", "--out", str(out))
    validate("ensemble", json.loads(out.read_text()))


@needs_cli
def test_cli_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[cov]\nhurst = [0.75]\npoints = [1.0, 2.0]\n')
    assert run("--config", str(cfg), "cov").stdout == "1,2,0.73035091339287417\n"
    assert run("--config", str(cfg), "cov", "--hurst", "0.5").stdout == "1,2,1.0\n"


@needs_cli
def test_cli_classify_srd_verify_schemas():
    validate("classify", json.loads(run("classify", "--hurst", "0.5,0.8").stdout))
    validate("srd", json.loads(run("srd", "--hurst", "0.75", "--p", "1", "--n-max", "20", "--format", "json").stdout))
    doc = json.loads(run("verify", "--suite", "kernels").stdout)
    validate("verify", doc)
    assert doc["passed"] is True


@needs_cli
def test_cli_dims_schema():
    doc = json.loads(run("dims", "--hurst", "0.5", "--grid-points", "16385", "--reps", "2", "--seed", "3").stdout)
    validate("dims", doc)
    assert abs(doc["graph"]["value"] - 1.5) < 0.15
