"""Wasserstein distance under the directed hop cost, primal and dual."""

from __future__ import annotations

import numpy as np
import pytest

import oracles
from conftest import SEED
from digricci import (
    MarginalMismatchError,
    distances,
    kantorovich_dual,
    wasserstein,
)
from digricci.lp import GAP_TOL


def dirac(i: int, n: int) -> np.ndarray:
    v = np.zeros(n)
    v[i] = 1.0
    return v


class TestHandValues:
    def test_c3_asymmetry(self, g_c3):
        dm = distances(g_c3)
        assert wasserstein(dirac(0, 3), dirac(1, 3), dm).value == pytest.approx(
            oracles.HAND["c3"]["w_d0_d1"], abs=1e-12
        )
        assert wasserstein(dirac(1, 3), dirac(0, 3), dm).value == pytest.approx(
            oracles.HAND["c3"]["w_d1_d0"], abs=1e-12
        )

    def test_identical_measures(self, g_tri, rng):
        dm = distances(g_tri)
        nu = rng.dirichlet(np.ones(3))
        assert wasserstein(nu, nu, dm).value == pytest.approx(0.0, abs=1e-12)

    def test_point_masses_recover_distance(self, corpus):
        for g in corpus[:10]:
            dm = distances(g)
            for x in range(g.n):
                for y in range(g.n):
                    w = wasserstein(dirac(x, g.n), dirac(y, g.n), dm, verify=False)
                    assert w.value == pytest.approx(dm.d[x, y], abs=1e-12)


class TestSolverContract:
    def test_residuals_on_random_measures(self, corpus, rng):
        for g in corpus[:10]:
            dm = distances(g)
            for _ in range(3):
                nu0 = rng.dirichlet(np.ones(g.n))
                nu1 = rng.dirichlet(np.ones(g.n))
                plan = wasserstein(nu0, nu1, dm)
                assert plan.marginal_residual <= 1e-10
                assert plan.duality_gap <= GAP_TOL
                assert (plan.pi >= 0).all()

    def test_matches_scipy(self, corpus, rng):
        for g in corpus[:10]:
            dm = distances(g)
            for _ in range(3):
                nu0 = rng.dirichlet(np.ones(g.n))
                nu1 = rng.dirichlet(np.ones(g.n))
                ours = wasserstein(nu0, nu1, dm, verify=False).value
                ref = oracles.linprog_transport(dm.d, nu0, nu1)
                assert ours == pytest.approx(ref, abs=1e-9)

    def test_mass_mismatch_rejected(self, g_c3):
        dm = distances(g_c3)
        with pytest.raises(MarginalMismatchError):
            wasserstein(np.array([0.5, 0.5, 0.1]), dirac(0, 3), dm)


class TestDual:
    def test_dual_value_matches_primal(self, corpus, rng):
        for g in corpus[:10]:
            dm = distances(g)
            nu0 = rng.dirichlet(np.ones(g.n))
            nu1 = rng.dirichlet(np.ones(g.n))
            primal = wasserstein(nu0, nu1, dm, verify=False).value
            value, f = kantorovich_dual(nu0, nu1, dm)
            assert value == pytest.approx(primal, abs=1e-9)
            assert float(f @ (nu1 - nu0)) == pytest.approx(value, abs=1e-12)

    def test_dual_witness_is_one_lipschitz(self, corpus, rng):
        for g in corpus[:10]:
            dm = distances(g)
            nu0 = rng.dirichlet(np.ones(g.n))
            nu1 = rng.dirichlet(np.ones(g.n))
            _, f = kantorovich_dual(nu0, nu1, dm)
            assert oracles.is_one_lipschitz(f, dm.d)

    def test_verify_mode_reports_gap(self, g_tri, rng):
        dm = distances(g_tri)
        nu0 = rng.dirichlet(np.ones(3))
        nu1 = rng.dirichlet(np.ones(3))
        plan = wasserstein(nu0, nu1, dm, verify=True)
        assert plan.dual_f is not None
        assert plan.duality_gap <= GAP_TOL


class TestMetricStructure:
    def test_directed_triangle_inequality(self, corpus):
        rng = np.random.default_rng(SEED + 3)
        checked = 0
        graphs = corpus[:10]
        while checked < 100:
            g = graphs[checked % len(graphs)]
            dm = distances(g)
            nus = [rng.dirichlet(np.ones(g.n)) for _ in range(3)]
            w02 = wasserstein(nus[0], nus[2], dm, verify=False).value
            w01 = wasserstein(nus[0], nus[1], dm, verify=False).value
            w12 = wasserstein(nus[1], nus[2], dm, verify=False).value
            assert w02 <= w01 + w12 + 1e-9
            checked += 1

    def test_zero_iff_equal(self, corpus, rng):
        for g in corpus[:5]:
            dm = distances(g)
            nu0 = rng.dirichlet(np.ones(g.n))
            nu1 = rng.dirichlet(np.ones(g.n))
            w = wasserstein(nu0, nu1, dm, verify=False).value
            if np.abs(nu0 - nu1).max() > 1e-9:
                assert w > 0
