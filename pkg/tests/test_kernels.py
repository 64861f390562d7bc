"""Backend equivalence: the numba kernels and the numpy fallbacks must agree
bit-for-bit on random inputs."""

import numpy as np
import pytest

from alertscope import kernels

try:
    NUMBA = kernels.load_backend("numba")
except ImportError:  # pragma: no cover
    NUMBA = None

NUMPY = kernels.load_backend("numpy")

pytestmark = pytest.mark.skipif(NUMBA is None, reason="numba not installed")


def random_columns(rng, n=5000, n_users=40, n_policies=6):
    return {
        "times": rng.integers(0, 10_000, n, dtype=np.int64),
        "excluded": rng.integers(0, 2, n, dtype=np.uint8),
        "user": rng.integers(0, n_users, n, dtype=np.int32),
        "policy": rng.integers(0, n_policies, n, dtype=np.int32),
        "user_lut": rng.integers(0, 2, n_users, dtype=np.uint8),
        "policy_lut": np.ones(n_policies, dtype=np.uint8),
        "row_flag": rng.integers(0, 2, n, dtype=np.uint8),
    }


@pytest.mark.parametrize("seed", range(5))
def test_selection_mask_equivalence(seed):
    rng = np.random.default_rng(seed)
    c = random_columns(rng)
    args = (
        c["times"], np.int64(2000), np.int64(8000), c["excluded"],
        c["user"], c["user_lut"], c["policy"], c["policy_lut"], c["row_flag"],
    )
    np.testing.assert_array_equal(NUMBA["selection_mask"](*args), NUMPY["selection_mask"](*args))


@pytest.mark.parametrize("seed", range(5))
def test_count_masked_equivalence(seed):
    rng = np.random.default_rng(seed)
    codes = rng.integers(0, 200, 4000, dtype=np.int32)
    mask = rng.integers(0, 2, 4000, dtype=np.uint8)
    for offset, bins in ((0, 200), (50, 100), (190, 30)):
        np.testing.assert_array_equal(
            NUMBA["count_masked"](codes, mask, offset, bins),
            NUMPY["count_masked"](codes, mask, offset, bins),
        )


@pytest.mark.parametrize("seed", range(5))
def test_count_pairs_dense_equivalence(seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 12, 3000, dtype=np.int32)
    b = rng.integers(0, 30, 3000, dtype=np.int32)
    mask = rng.integers(0, 2, 3000, dtype=np.uint8)
    np.testing.assert_array_equal(
        NUMBA["count_pairs_dense"](a, 0, 12, b, 3, 20, mask),
        NUMPY["count_pairs_dense"](a, 0, 12, b, 3, 20, mask),
    )


@pytest.mark.parametrize("seed", range(5))
def test_pair_keys_masked_equivalence(seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 12, 3000, dtype=np.int32)
    b = rng.integers(0, 30, 3000, dtype=np.int32)
    mask = rng.integers(0, 2, 3000, dtype=np.uint8)
    np.testing.assert_array_equal(
        np.sort(NUMBA["pair_keys_masked"](a, 0, b, 0, 30, mask)),
        np.sort(NUMPY["pair_keys_masked"](a, 0, b, 0, 30, mask)),
    )


@pytest.mark.parametrize("seed", range(5))
def test_flag_rows_with_any_equivalence(seed):
    rng = np.random.default_rng(seed)
    member_rows = rng.integers(0, 500, 2000, dtype=np.int32)
    member_codes = rng.integers(0, 80, 2000, dtype=np.int32)
    lut = rng.integers(0, 2, 80, dtype=np.uint8)
    np.testing.assert_array_equal(
        NUMBA["flag_rows_with_any"](member_rows, member_codes, lut, 500),
        NUMPY["flag_rows_with_any"](member_rows, member_codes, lut, 500),
    )


def test_env_flag_selects_backend(monkeypatch):
    import importlib
    import subprocess
    import sys

    code = "import alertscope.kernels as k; print(k.BACKEND)"
    for want in ("numpy", "numba"):
        out = subprocess.run(
            [sys.executable, "-c", code],
            env={"ALERTSCOPE_KERNELS": want, "PATH": "/usr/bin:/bin"},
            capture_output=True,
            text=True,
            cwd="/root/pkg/src",
        )
        assert out.stdout.strip() == want, out.stderr
