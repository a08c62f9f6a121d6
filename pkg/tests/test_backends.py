"""Cross-backend agreement: compiled kernels vs the pure-numpy reference.

The integer layer (Philox words, derived seeds) must agree exactly; float
outputs agree to rounding because the backends may use different libm
builds.
"""

import numpy as np
import pytest

from flowlab import _backend
from flowlab import _kernels_py as kp

try:
    from flowlab import _kernels_cy as kc
    HAVE_CY = True
except ImportError:
    kc = None
    HAVE_CY = False

needs_cython = pytest.mark.skipif(not HAVE_CY,
                                  reason="compiled kernels not built")


def test_backend_exports_complete():
    for name in _backend.KERNEL_NAMES:
        assert hasattr(kp, name)
        if HAVE_CY:
            assert hasattr(kc, name)


def test_selected_backend_reported():
    assert _backend.BACKEND in ("cython", "python")
    assert "python" in _backend.available_backends()


@needs_cython
class TestIntegerLayer:
    def test_philox_words_exact(self):
        for seed in (0, 1, 987654321, 2**63 + 11, 2**64 - 1):
            for lane in (1, 2, 4):
                for step in (-2**62, -1000, -1, 0, 1, 2**40):
                    assert kp.philox_words(seed, lane, step) == \
                        kc.philox_words(seed, lane, step)

    def test_derive_seed_exact(self):
        for seed in (0, 5, 2**64 - 1):
            for k in (0, 1, 999, 10**6):
                assert kp.derive_seed(seed, k) == kc.derive_seed(seed, k)


@needs_cython
class TestFloatLayer:
    def test_std_normals_close(self):
        a = kp.std_normals(314, 2, -700, 2000)
        b = kc.std_normals(314, 2, -700, 2000)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)

    def test_running_max_close(self):
        a = kp.running_max_batch(11, 5, 500, 300, 1e-3)
        b = kc.running_max_batch(11, 5, 500, 300, 1e-3)
        np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-13)

    @pytest.mark.parametrize("mid,params,x0", [
        (1, [-2.0, 0.7], [1.5]),
        (2, [-3.0, 0.5, 0.25, 1.0], [2.0, 0.5]),
        (2, [2.0, 0.5, 0.25, 1.0], [1.0, 0.0]),
        (3, [0.1, 1.0], [1.0]),
    ])
    def test_one_point_batch_close(self, mid, params, x0):
        outs_p = kp.one_point_batch(mid, params, np.array(x0), 77, 0, 400, 250, 1e-3)
        outs_c = kc.one_point_batch(mid, params, np.array(x0), 77, 0, 400, 250, 1e-3)
        for a, b in zip(outs_p, outs_c):
            np.testing.assert_allclose(np.asarray(a, float), np.asarray(b, float),
                                       rtol=1e-9, atol=1e-12)

    def test_pair_sup_close(self):
        a, _ = kp.pair_sup_batch(3, [0.0, 1.0], np.array([1.0]), np.array([2.0]),
                                 3, 0, 300, 400, 1e-3)
        b, _ = kc.pair_sup_batch(3, [0.0, 1.0], np.array([1.0]), np.array([2.0]),
                                 3, 0, 300, 400, 1e-3)
        np.testing.assert_allclose(a, b, rtol=1e-9)

    def test_cloud_diam_close(self):
        pts = np.stack([np.linspace(0, 0.01, 8), np.zeros(8)], axis=1)
        a, _ = kp.cloud_diam_batch(2, [-3.0, 0.5, 0.25, 1.0], pts, 5, 0, 150,
                                   200, 1e-3)
        b, _ = kc.cloud_diam_batch(2, [-3.0, 0.5, 0.25, 1.0], pts, 5, 0, 150,
                                   200, 1e-3)
        np.testing.assert_allclose(a, b, rtol=1e-9)

    def test_evolve_cloud_close_with_pairs(self):
        pts_a = np.array([[1.0, 0.0], [0.0, 1.0], [0.7, 0.7]])
        pts_b = pts_a.copy()
        nm = np.linalg.norm(pts_a, axis=1)
        mins_a, maxs_a = nm.copy(), nm.copy()
        mins_b, maxs_b = nm.copy(), nm.copy()
        pm_a = np.zeros((3, 3))
        pm_b = np.zeros((3, 3))
        ra = kp.evolve_cloud(2, [-1.0, 0.5, 0.25, 1.0], pts_a, 9, -100, 150,
                             1e-2, mins_a, maxs_a, pm_a)
        rb = kc.evolve_cloud(2, [-1.0, 0.5, 0.25, 1.0], pts_b, 9, -100, 150,
                             1e-2, mins_b, maxs_b, pm_b)
        assert ra == rb
        np.testing.assert_allclose(pts_a, pts_b, rtol=1e-9)
        np.testing.assert_allclose(pm_a, pm_b, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(mins_a, mins_b, rtol=1e-9)
        np.testing.assert_allclose(maxs_a, maxs_b, rtol=1e-9)


@needs_cython
class TestDivergenceParity:
    def test_overflow_flagged_by_both(self):
        # multiplicative model with huge rate blows past 1e300
        for mod in (kp, kc):
            _, div = mod.pair_sup_batch(3, [800.0, 0.0], np.array([1.0]),
                                        np.array([2.0]), 1, 0, 10, 300, 1.0)
            assert div.all()

    def test_zero_model_identity(self):
        for mod in (kp, kc):
            term, mn, mx, div = mod.one_point_batch(0, [2.0], np.array([3.0, 4.0]),
                                                    1, 0, 10, 50, 1e-2)
            np.testing.assert_array_equal(term, np.full(10, 5.0))
            np.testing.assert_array_equal(mn, mx)
            assert not div.any()
