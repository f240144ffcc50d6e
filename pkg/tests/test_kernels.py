from __future__ import annotations

import numpy as np
import pytest

import oracles
from vadkit.kernels import _reference

try:
    from vadkit.kernels import _fused
except ImportError:
    _fused = None

IMPLEMENTATIONS = [("numpy", _reference)]
if _fused is not None:
    IMPLEMENTATIONS.append(("compiled", _fused))


def _random_unit_rows(rng, n, d):
    m = rng.standard_normal((n, d))
    return np.ascontiguousarray(m / np.linalg.norm(m, axis=1, keepdims=True))


@pytest.mark.parametrize("name,impl", IMPLEMENTATIONS)
class TestAgainstOracle:
    def test_argmax_matches_enumeration(self, name, impl):
        rng = np.random.default_rng(5)
        for _ in range(25):
            q = _random_unit_rows(rng, int(rng.integers(1, 40)), 16)
            p = _random_unit_rows(rng, int(rng.integers(1, 60)), 16)
            idx, sims = impl.argmax_dot(q, p)
            want_idx, want_sims = oracles.argmax_selection(q, p)
            assert idx.tolist() == want_idx
            np.testing.assert_allclose(sims, want_sims, atol=1e-12)

    def test_topk_matches_enumeration(self, name, impl):
        rng = np.random.default_rng(6)
        for _ in range(25):
            q = _random_unit_rows(rng, int(rng.integers(1, 30)), 8)
            p = _random_unit_rows(rng, int(rng.integers(2, 50)), 8)
            k = int(rng.integers(1, p.shape[0] + 1))
            idx, sims = impl.topk_dot(q, p, k)
            for row in range(q.shape[0]):
                want = oracles.topk_selection(q[row], p, k)
                assert idx[row].tolist() == want

    def test_tie_breaks_toward_lower_index(self, name, impl):
        q = np.ascontiguousarray([[1.0, 0.0]])
        p = np.ascontiguousarray(
            [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.5, 0.5]]
        )
        idx, _ = impl.argmax_dot(q, p)
        assert idx.tolist() == [1]
        top_idx, _ = impl.topk_dot(q, p, 2)
        assert top_idx[0].tolist() == [1, 2]


@pytest.mark.skipif(_fused is None, reason="compiled kernels unavailable")
class TestBackendAgreement:
    def test_backends_agree_on_random_inputs(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            q = _random_unit_rows(rng, 37, 24)
            p = _random_unit_rows(rng, 53, 24)
            ref_idx, ref_sims = _reference.argmax_dot(q, p)
            fus_idx, fus_sims = _fused.argmax_dot(q, p)
            assert ref_idx.tolist() == fus_idx.tolist()
            np.testing.assert_allclose(ref_sims, fus_sims, atol=1e-12)

            ref_idx, ref_sims = _reference.topk_dot(q, p, 7)
            fus_idx, fus_sims = _fused.topk_dot(q, p, 7)
            assert ref_idx.tolist() == fus_idx.tolist()
            np.testing.assert_allclose(ref_sims, fus_sims, atol=1e-12)


class TestPublicWrappers:
    def test_k_clamped_to_pool_size(self):
        from vadkit import kernels

        q = np.eye(3)[:1]
        p = np.eye(3)
        idx, sims = kernels.topk_dot(q, p, 50)
        assert idx.shape == (1, 3)

    def test_dim_mismatch_rejected(self):
        from vadkit import kernels

        with pytest.raises(ValueError):
            kernels.argmax_dot(np.zeros((1, 3)), np.zeros((2, 4)))

    def test_empty_pool_rejected(self):
        from vadkit import kernels

        with pytest.raises(ValueError):
            kernels.argmax_dot(np.zeros((1, 3)), np.zeros((0, 3)))
