"""Acceptance suite. Each test carries a ``criterion`` marker; the terminal
summary prints one PASS/FAIL line per criterion (see conftest.py)."""

import itertools
import random
import time
from fractions import Fraction as F

import pytest

from switchfts.ladder import compute_ladder, md_ladder, mi_ladder
from switchfts.linalg import Matrix, Subspace, image, invert, subspace_intersect, subspace_sum
from switchfts.normalform import decompose, verify_normal_form
from switchfts.rate import arbitrarily_fast, decay_certificate, scalar_min_rate_mi
from switchfts.simulate import exhaustive_fts_check, simulate
from switchfts.synthesis import GainSet, certify_gains, decide_fts, synthesize_md, synthesize_mi

from conftest import random_corpus

criterion = pytest.mark.criterion


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


@criterion("MD ladder: dims [0,1,2,3], p = 3, E_3 = R^3, < 1 s")
def test_md_ladder(worked):
    with Timer() as t:
        L = md_ladder(worked)
    assert L.dims == [0, 1, 2, 3]
    assert L.p == 3
    assert L.fixed_point == Subspace.full(3)
    assert t.elapsed < 1.0


@criterion("MI ladder: fixed point of dim 2 equal to {x3 = 0}")
def test_mi_ladder(worked):
    L = mi_ladder(worked)
    assert L.fixed_point.dim == 2
    assert L.fixed_point == Subspace.span_of([(1, 0, 0), (0, 1, 0)], 3)


@criterion("Printed gains: K1 = [0,-1,-0.5], K2 = [0,-1,0.5] reach exact zero at T = 3 (8 x 3), < 1 s")
def test_printed_md_gains(worked, printed_md_gains):
    with Timer() as t:
        rep = exhaustive_fts_check(worked, printed_md_gains, 3)
    assert t.elapsed < 1.0
    assert rep.sequences_checked == 24
    assert rep.all_reach_zero, f"counterexample (x0, sigma 0-based) = {rep.counterexample}"


@criterion("Printed gains: K = [0,-1,0] reaches zero at T = 2 on a basis of E_2, < 1 s")
def test_printed_mi_gain_on_fixed_point(worked, printed_mi_gain):
    basis = mi_ladder(worked).fixed_point.vectors()
    with Timer() as t:
        rep = exhaustive_fts_check(worked, printed_mi_gain, 2, basis)
    assert t.elapsed < 1.0
    assert rep.sequences_checked == 8
    assert rep.all_reach_zero


@criterion("Printed gains: K = [0,-1,0] fails at T = 3 on the full basis with a replayable counterexample, < 1 s")
def test_printed_mi_gain_full_basis(worked, printed_mi_gain):
    with Timer() as t:
        rep = exhaustive_fts_check(worked, printed_mi_gain, 3)
    assert t.elapsed < 1.0
    assert not rep.all_reach_zero
    x0, seq = rep.counterexample
    assert len(seq) == 3
    assert any(v != 0 for v in simulate(worked, printed_mi_gain, x0, seq).states[-1])


@criterion("Synthesized gains pass certify_gains and exhaustive_fts_check like the printed ones")
def test_synthesized_gains(worked, printed_mi_gain):
    md = md_ladder(worked)
    g = synthesize_md(md)
    assert certify_gains(worked, g, md).ok
    rep = exhaustive_fts_check(worked, g, 3)
    assert rep.all_reach_zero and rep.sequences_checked == 24

    mi = mi_ladder(worked)
    k = synthesize_mi(mi)
    assert certify_gains(worked, k, mi).ok
    basis = mi.fixed_point.vectors()
    ours = exhaustive_fts_check(worked, k, 2, basis)
    theirs = exhaustive_fts_check(worked, printed_mi_gain, 2, basis)
    assert ours.all_reach_zero == theirs.all_reach_zero is True
    assert not exhaustive_fts_check(worked, k, 3).all_reach_zero


@criterion("Normal form (MI): zero lower-left blocks, nilpotent y-products, residual fixed point {0}, mode-2 blocks match")
def test_normal_form(worked, printed_P, printed_mi_gain):
    nf = decompose(worked, "mi")
    rep = verify_normal_form(nf)
    assert rep.lower_left_zero and rep.bad_modes == ()
    assert rep.y_nilpotent and rep.products_checked == 4
    assert rep.xi_fixed_point_dim == 0

    # z = P x, so the basis matrix in x = T z is P^-1
    nf = decompose(worked, "mi", transform=invert(printed_P), gains=printed_mi_gain)
    assert verify_normal_form(nf).ok
    assert nf.A_yy[1] == Matrix([[0, 2], [0, 0]])
    assert nf.A_yxi[1] == Matrix.column([0, 3])
    assert nf.A_xixi[1] == Matrix([[F(1, 2)]])
    assert nf.B_y[1] == Matrix.column([0, 0])
    assert nf.B_xi[1] == Matrix([[-1]])
    # mode-1 blocks are recorded, not compared against print
    print("mode-1 blocks:", nf.A_yy[0], nf.A_yxi[0], nf.A_xixi[0], nf.B_y[0], nf.B_xi[0])


@criterion("Scalar rate: (1/2,1/2),(1,-1) -> 1/2 at k = 0; (0,1/2),(1,-1) -> 1/4 at k = 1/4")
def test_scalar_rate():
    assert scalar_min_rate_mi([F(1, 2), F(1, 2)], [1, -1]) == (F(1, 2), 0)
    assert scalar_min_rate_mi([0, F(1, 2)], [1, -1]) == (F(1, 4), F(1, 4))


@criterion("Arbitrarily fast == decide_fts == exhaustive_fts_check(T = p) on 500 seeded systems, < 1 min")
def test_rate_fts_identity():
    with Timer() as t:
        for sys in random_corpus(500, seed=2024):
            for kind in ("md", "mi"):
                v = decide_fts(sys, kind)
                assert arbitrarily_fast(sys, kind).arbitrarily_fast == v.is_fts
                gains = v.witness or GainSet.zero(sys, kind)
                assert exhaustive_fts_check(sys, gains, v.ladder.p).all_reach_zero == v.is_fts
    assert t.elapsed < 60.0


@criterion("Property suite: monotone ladders, p <= n, MI within MD, scaling, tie-breaking, modular law, canonical form")
def test_property_suite():
    corpus = random_corpus(200, seed=7)
    for sys in corpus:
        ladders = {}
        for kind in ("md", "mi"):
            L = compute_ladder(sys, kind)
            ladders[kind] = L
            assert all(a.E.issubset(b.E) for a, b in zip(L.steps, L.steps[1:]))
            assert L.p <= sys.n
            for rho in (F(1, 2), F(2), F(3)):
                S = compute_ladder(sys.scaled(rho), kind)
                assert [s.E for s in S.steps] == [s.E for s in L.steps]
            other = compute_ladder(sys, kind, policy="min_norm")
            assert [s.E for s in other.steps] == [s.E for s in L.steps]
            a, b = decide_fts(sys, kind), decide_fts(sys, kind, policy="min_norm")
            assert (a.is_fts, a.horizon) == (b.is_fts, b.horizon)
            if b.witness is not None:
                assert certify_gains(sys, b.witness, b.ladder).ok
        for k in range(sys.n + 1):
            assert ladders["mi"].E(k).issubset(ladders["md"].E(k))

    rng = random.Random(8)
    for _ in range(300):
        n = rng.randint(1, 4)
        dx, dy = rng.randint(0, n), rng.randint(0, n)
        X = Matrix([[rng.randint(-2, 2) for _ in range(dx)] for _ in range(n)], ncols=dx)
        Y = Matrix([[rng.randint(-2, 2) for _ in range(dy)] for _ in range(n)], ncols=dy)
        V, W = image(X), image(Y)
        assert V.dim + W.dim == subspace_sum(V, W).dim + subspace_intersect(V, W).dim
        # any invertible recombination of the spanning columns gives the same basis
        if dx:
            mix = Matrix.identity(dx)
            for i, j in itertools.permutations(range(dx), 2):
                if rng.random() < 0.5:
                    E = [[int(r == c) + (rng.randint(-2, 2) if (r, c) == (i, j) else 0) for c in range(dx)]
                         for r in range(dx)]
                    mix = mix @ Matrix(E)
            assert image(X @ mix).basis == V.basis


@criterion("Decay certificate: MD gains, rho = 1/2, |x(t)|^2 <= C^2 rho^2t |x0|^2 over 2^6 sequences")
def test_decay_certificate(worked):
    g = synthesize_md(md_ladder(worked))
    cert = decay_certificate(worked, g, F(1, 2))
    for x0 in Matrix.identity(3).columns():
        for seq in itertools.product(range(2), repeat=6):
            nsq = simulate(worked, g, x0, seq).norms_sq()
            for t, v in enumerate(nsq):
                assert v <= cert.C**2 * cert.rho ** (2 * t) * nsq[0]
