import itertools
import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import linprog

from switchfts.linalg import Matrix
from switchfts.rate import (
    NotFts,
    arbitrarily_fast,
    decay_certificate,
    lower_bound_rate_mi,
    min_max_residual,
    one_step_annihilation,
    rational_sqrt_upper,
    scalar_min_rate_md,
    scalar_min_rate_mi,
    scale_system,
)
from switchfts.simulate import simulate
from switchfts.synthesis import GainSet, decide_fts, synthesize_md
from switchfts.ladder import md_ladder
from switchfts.system import SwitchedSystem

from conftest import random_corpus


def lp_oracle(a, b):
    """min t s.t. -t <= a_j + b_j k <= t, solved in floating point."""
    A_ub, b_ub = [], []
    for aj, bj in zip(a, b):
        A_ub.append([float(bj), -1.0])
        b_ub.append(-float(aj))
        A_ub.append([-float(bj), -1.0])
        b_ub.append(float(aj))
    res = linprog([0.0, 1.0], A_ub=A_ub, b_ub=b_ub, bounds=[(None, None), (0, None)])
    return res.fun


def test_scalar_printed_candidate():
    rho, k = scalar_min_rate_mi([F(1, 2), F(1, 2)], [1, -1])
    assert (rho, k) == (F(1, 2), 0)
    assert lp_oracle([0.5, 0.5], [1, -1]) == pytest.approx(0.5, abs=1e-9)


def test_scalar_recomputed_candidate():
    rho, k = scalar_min_rate_mi([0, F(1, 2)], [1, -1])
    assert (rho, k) == (F(1, 4), F(1, 4))
    assert lp_oracle([0, 0.5], [1, -1]) == pytest.approx(0.25, abs=1e-9)


def test_scalar_no_authority_and_single_mode():
    assert scalar_min_rate_mi([2], [0]) == (2, 0)
    assert scalar_min_rate_mi([2, 3], [1, 0]) == (3, 0)
    assert scalar_min_rate_mi([5], [2])[0] == 0


def test_scalar_md():
    assert scalar_min_rate_md([F(1, 2), F(1, 2)], [1, -1]) == 0
    assert scalar_min_rate_md([2, 3], [1, 0]) == 3


@pytest.mark.parametrize("a,b", [((F(1, 2), F(1, 2)), (1, -1)), ((0, F(1, 2)), (1, -1))])
def test_scalar_random_probe(a, b):
    rho, _ = scalar_min_rate_mi(a, b)
    rng = random.Random(1)
    for _ in range(10_000):
        k = F(rng.randint(-4000, 4000), 1000)
        assert max(abs(x + y * k) for x, y in zip(a, b)) >= rho


def test_scalar_against_lp_random():
    rng = random.Random(2)
    for _ in range(200):
        M = rng.randint(1, 4)
        a = [F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(M)]
        b = [F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(M)]
        rho, k = scalar_min_rate_mi(a, b)
        assert max(abs(x + y * k) for x, y in zip(a, b)) == rho
        assert float(rho) == pytest.approx(lp_oracle(a, b), abs=1e-7)


def test_rational_sqrt_upper():
    assert rational_sqrt_upper(F(9, 4)) == F(3, 2)
    r = rational_sqrt_upper(F(2))
    assert r * r >= 2
    assert r - F(14142135, 10**7) < F(1, 10**5)
    with pytest.raises(ValueError):
        rational_sqrt_upper(F(-1))


def test_decay_certificate_worked_example(worked):
    g = synthesize_md(md_ladder(worked))
    cert = decay_certificate(worked, g, F(1, 2))
    assert cert.horizon == 3
    assert cert.C == max(F(1), cert.mu**2) * 8
    closed = worked.closed_loop(g.per_mode(2))
    assert cert.mu**2 >= max(C.frobenius_sq() for C in closed)
    # |x(t)|^2 <= C^2 rho^(2t) |x0|^2 on every length-6 sequence
    starts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -2, 3), (F(1, 3), 5, -1)]
    for x0 in starts:
        for seq in itertools.product(range(2), repeat=6):
            nsq = simulate(worked, g, x0, seq).norms_sq()
            for t, v in enumerate(nsq):
                assert v <= cert.C**2 * cert.rho ** (2 * t) * nsq[0]


def test_decay_certificate_rho_one(worked):
    g = synthesize_md(md_ladder(worked))
    cert = decay_certificate(worked, g, 1)
    assert cert.C == max(F(1), cert.mu ** (cert.horizon - 1))


def test_decay_certificate_large_rho(worked):
    g = synthesize_md(md_ladder(worked))
    assert decay_certificate(worked, g, 3).C == decay_certificate(worked, g, 1).C


def test_decay_certificate_rejects(worked, printed_md_gains):
    with pytest.raises(NotFts):
        decay_certificate(worked, GainSet.common(Matrix([[0, -1, 0]])), F(1, 2))
    with pytest.raises(ValueError):
        decay_certificate(worked, printed_md_gains, F(1, 2))
    g = synthesize_md(md_ladder(worked))
    with pytest.raises(ValueError):
        decay_certificate(worked, g, 0)


def test_one_step_annihilation(worked):
    w = one_step_annihilation(worked, "mi")
    assert w is not None
    x = w.x
    (u,) = w.inputs
    for A, B in zip(worked.A, worked.B):
        assert all(v == 0 for v in (A @ Matrix.column(x) + B @ Matrix.column(u)).col(0))
    none = SwitchedSystem((Matrix.identity(2),) * 2, (Matrix.zeros(2, 1),) * 2)
    assert one_step_annihilation(none, "md") is None


def test_arbitrarily_fast_agrees_with_fts():
    for sys in random_corpus(150, seed=41):
        for kind in ("md", "mi"):
            r = arbitrarily_fast(sys, kind)
            v = decide_fts(sys, kind)
            assert r.arbitrarily_fast == v.is_fts
            assert r.fts_horizon == v.horizon


@pytest.mark.parametrize("rho", [F(1, 3), F(1, 2), F(2)])
def test_scale_invariance_of_ladder_dims(rho):
    for sys in random_corpus(60, seed=42):
        for kind in ("md", "mi"):
            assert decide_fts(scale_system(sys, rho), kind).ladder.dims == decide_fts(sys, kind).ladder.dims


def test_min_max_residual_on_annihilated_direction(worked):
    x = np.array([1.0, -1.0, 0.0]) / math.sqrt(2)
    val, u = min_max_residual(worked, x)
    assert val == pytest.approx(0.0, abs=1e-6)
    # the common gain [0, -1, 0] gives u = 1/sqrt(2) here
    assert u[0] == pytest.approx(1 / math.sqrt(2), abs=1e-5)


def test_lower_bound_identity_no_input():
    sys = SwitchedSystem((Matrix.identity(2),) * 2, (Matrix.zeros(2, 1),) * 2)
    est = lower_bound_rate_mi(sys, samples=16, seed=0)
    assert est.alpha_approx == pytest.approx(1.0, abs=1e-9)
    assert not est.certified


def test_lower_bound_scalar_printed():
    sys = SwitchedSystem.from_lists([[[F(1, 2)]], [[F(1, 2)]]], [[[1]], [[-1]]])
    est = lower_bound_rate_mi(sys, samples=8, seed=3)
    assert est.alpha_approx == pytest.approx(0.5, abs=1e-6)
    assert (est.samples, est.seed) == (8, 3)


def test_lower_bound_is_seed_deterministic(worked):
    a = lower_bound_rate_mi(worked, samples=20, seed=9)
    b = lower_bound_rate_mi(worked, samples=20, seed=9)
    assert a == b
