"""Cross-mode checks between the compiled kernels and the pure-Python
fallback (JURISIM_NO_NUMBA=1).

Every sampling decision (topic assignments, walk steps, negative draws)
must be bit-identical, since both modes consume the same integer RNG
stream. SGNS vector entries may differ by a few ulps because the compiled
code fuses float multiply-adds that numpy evaluates with temporaries."""

import os
import subprocess
import sys
from pathlib import Path

import numpy as np

from jurisim import _kernels as K

WORKER = Path(__file__).parent / "_parity_worker.py"


def run_worker(tmp_path, tag, disable_numba):
    out = tmp_path / f"{tag}.npz"
    env = dict(os.environ)
    if disable_numba:
        env["JURISIM_NO_NUMBA"] = "1"
    else:
        env.pop("JURISIM_NO_NUMBA", None)
    subprocess.run(
        [sys.executable, str(WORKER), str(out)], check=True, env=env, timeout=300
    )
    return np.load(out)


EXACT_KEYS = ("gibbs_z", "gibbs_ndk", "gibbs_state", "sec_probs", "walks", "lengths", "alias_draws")
CLOSE_KEYS = ("sgns_in", "sgns_out", "sgns_losses")


def test_pure_and_compiled_modes_agree(tmp_path):
    compiled = run_worker(tmp_path, "compiled", disable_numba=False)
    pure = run_worker(tmp_path, "pure", disable_numba=True)
    assert pure["numba_enabled"][0] == 0
    for key in EXACT_KEYS:
        assert np.array_equal(compiled[key], pure[key]), f"mode mismatch in {key}"
    for key in CLOSE_KEYS:
        np.testing.assert_allclose(compiled[key], pure[key], rtol=0, atol=1e-12, err_msg=key)


def test_env_flag_disables_numba():
    env = dict(os.environ, JURISIM_NO_NUMBA="1")
    result = subprocess.run(
        [sys.executable, "-c", "from jurisim import _kernels; print(_kernels.NUMBA_ENABLED)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert result.stdout.strip() == "False"


def test_draws_are_near_uniform():
    probs = np.full(10, 0.1)
    accept = np.zeros(10)
    alias = np.zeros(10, dtype=np.int64)
    K.run_kernel(K.build_alias_blocks, probs, np.array([0, 10], dtype=np.int64), accept, alias)
    draws = K.run_kernel(K.alias_sample_many, accept, alias, 0, 10, 50000, K.seed_to_u64(0))
    counts = np.bincount(draws, minlength=10)
    assert np.abs(counts / 50000 - 0.1).max() < 0.01


def test_alias_table_is_proper_distribution():
    rng = np.random.default_rng(4)
    probs = rng.random(17)
    probs /= probs.sum()
    accept = np.zeros(17)
    alias = np.zeros(17, dtype=np.int64)
    K.run_kernel(K.build_alias_blocks, probs, np.array([0, 17], dtype=np.int64), accept, alias)
    # reconstruct the probabilities encoded by the table
    implied = accept / 17.0
    for i in range(17):
        implied[alias[i]] += (1.0 - accept[i]) / 17.0
    np.testing.assert_allclose(implied, probs, atol=1e-12)


def test_zero_probability_outcome_never_drawn():
    probs = np.array([0.0, 0.5, 0.5])
    accept = np.zeros(3)
    alias = np.zeros(3, dtype=np.int64)
    K.run_kernel(K.build_alias_blocks, probs, np.array([0, 3], dtype=np.int64), accept, alias)
    draws = K.run_kernel(K.alias_sample_many, accept, alias, 0, 3, 20000, K.seed_to_u64(2))
    assert np.all(draws != 0)
