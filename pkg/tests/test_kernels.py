"""The jit-compiled loops and the vectorized numpy fallbacks must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from nosell import kernels

from helpers import MASTER_SEED

pytestmark = pytest.mark.filterwarnings("error::RuntimeWarning")


def _random_case(rng, max_n=8):
    n = int(rng.integers(1, max_n + 1))
    deltas = rng.uniform(-10.0, 10.0, n)
    budget = float(20.0 * (1.0 - rng.random()))
    return deltas, budget


def test_backend_dispatch():
    assert kernels.BACKEND in ("numba", "numpy")
    if kernels.HAVE_NUMBA:
        assert kernels.threshold_scan is kernels.threshold_scan_jit
        assert kernels.active_set_scan is kernels.active_set_scan_jit
        assert kernels.grid_l1_scan is kernels.grid_l1_scan_jit
    else:
        assert kernels.threshold_scan is kernels.threshold_scan_numpy
        assert kernels.active_set_scan is kernels.active_set_scan_numpy
        assert kernels.grid_l1_scan is kernels.grid_l1_scan_numpy


def test_env_flag_forces_numpy_backend():
    env = dict(os.environ, NOSELL_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "import nosell; print(nosell.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_threshold_scan_pair_agreement():
    rng = np.random.default_rng(MASTER_SEED)
    for trial in range(300):
        deltas, budget = _random_case(rng)
        sorted_desc = np.ascontiguousarray(np.sort(deltas)[::-1])
        k_loop, lam_loop = kernels.threshold_scan_loop(sorted_desc, budget)
        k_np, lam_np = kernels.threshold_scan_numpy(sorted_desc, budget)
        msg = f"seed={MASTER_SEED} trial={trial} deltas={deltas.tolist()} budget={budget!r}"
        assert k_loop == k_np, msg
        assert lam_loop == pytest.approx(lam_np, abs=1e-12), msg
        dispatched = kernels.threshold_scan(sorted_desc, budget)
        assert dispatched[0] == k_loop
        assert dispatched[1] == pytest.approx(lam_loop, abs=1e-12)


def test_threshold_scan_prefix_structure():
    # the satisfying k form a prefix: lhs(k) is non-decreasing
    rng = np.random.default_rng(MASTER_SEED + 1)
    for _ in range(100):
        deltas, budget = _random_case(rng)
        sorted_desc = np.ascontiguousarray(np.sort(deltas)[::-1])
        prefix = np.cumsum(sorted_desc)
        ks = np.arange(1, deltas.size + 1)
        lhs = prefix - ks * sorted_desc
        assert np.all(np.diff(lhs) >= -1e-9)
        k_star, _ = kernels.threshold_scan(sorted_desc, budget)
        assert bool(lhs[k_star - 1] < budget)
        if k_star < deltas.size:
            assert not bool(lhs[k_star] < budget)


def test_active_set_pair_agreement():
    rng = np.random.default_rng(MASTER_SEED + 2)
    for trial in range(300):
        deltas, budget = _random_case(rng)
        m_loop, o_loop = kernels.active_set_scan_loop(deltas, budget, 1e-9)
        m_np, o_np = kernels.active_set_scan_numpy(deltas, budget, 1e-9)
        msg = f"seed={MASTER_SEED + 2} trial={trial} deltas={deltas.tolist()} budget={budget!r}"
        assert m_loop == m_np, msg
        assert o_loop == pytest.approx(o_np, abs=1e-9), msg


def test_active_set_small_exact():
    deltas = np.array([3.0, 1.0, -2.0])
    m1, o1 = kernels.active_set_scan_numpy(deltas, 2.0, 1e-9)
    m2, o2 = kernels.active_set_scan_loop(deltas, 2.0, 1e-9)
    assert (m1, o1) == (m2, o2)
    # mask 1 (only the largest delta active) wins with objective 6
    assert m1 == 0b001
    assert o1 == pytest.approx(6.0, abs=1e-12)


def test_active_set_numpy_chunk_boundary():
    # 17 assets -> 131071 masks -> more than one 2^16 chunk; the winning
    # support must match the closed-form solver
    from nosell import ContributionProblem, solve_l2

    rng = np.random.default_rng(MASTER_SEED + 4)
    deltas = rng.uniform(-10.0, 10.0, 17)
    budget = 12.5
    mask, _ = kernels.active_set_scan_numpy(deltas, budget, 1e-9)
    members = [i for i in range(17) if mask >> i & 1]
    lam = (float(np.sum(deltas[members])) - budget) / len(members)
    candidate = np.zeros(17)
    candidate[members] = np.maximum(deltas[members] - lam, 0.0)
    solution = solve_l2(ContributionProblem(deltas, budget))
    np.testing.assert_allclose(candidate, solution.adjustments, atol=1e-9)


def test_grid_pair_agreement():
    rng = np.random.default_rng(MASTER_SEED + 3)
    for trial in range(200):
        deltas, budget = _random_case(rng, max_n=4)
        resolution = int(rng.integers(1, 60))
        c_loop, o_loop = kernels.grid_l1_scan_loop(deltas, budget, resolution)
        c_np, o_np = kernels.grid_l1_scan_numpy(deltas, budget, resolution)
        msg = (
            f"seed={MASTER_SEED + 3} trial={trial} deltas={deltas.tolist()} "
            f"budget={budget!r} resolution={resolution}"
        )
        # tie-breaking between equal-cost compositions may differ; the
        # minima must not
        assert o_loop == pytest.approx(o_np, abs=1e-9), msg
        step = budget / resolution
        for cells, obj in ((c_loop, o_loop), (c_np, o_np)):
            assert cells.sum() == resolution, msg
            assert np.all(cells >= 0), msg
            recomputed = float(np.sum(np.abs(cells * step - deltas)))
            assert obj == pytest.approx(recomputed, abs=1e-9), msg


def test_grid_single_asset():
    cells, obj = kernels.grid_l1_scan_loop(np.array([4.0]), 2.0, 17)
    assert cells.tolist() == [17]
    assert obj == pytest.approx(2.0, abs=1e-12)
    cells, obj = kernels.grid_l1_scan_numpy(np.array([4.0]), 2.0, 17)
    assert cells.tolist() == [17]
    assert obj == pytest.approx(2.0, abs=1e-12)


def test_grid_candidate_count_matches_compositions():
    # count candidates via a shim around the loop's odometer
    import math

    deltas = np.array([0.3, -0.2, 0.1])
    resolution = 9
    seen = set()
    n = deltas.size
    head = [0] * (n - 1)
    used = 0
    while True:
        seen.add(tuple(head) + (resolution - used,))
        j = n - 2
        while j >= 0:
            if used < resolution:
                head[j] += 1
                used += 1
                break
            used -= head[j]
            head[j] = 0
            j -= 1
        if j < 0:
            break
    assert len(seen) == math.comb(resolution + n - 1, n - 1)
