import itertools
import math

import numpy as np
import pytest

from spapprox import (
    AxisGeom,
    AxisPow,
    BudgetError,
    CertificationError,
    ConvergenceError,
    ExplicitSeqPsi,
    ExplicitTablePsi,
    InputDomainError,
    PhasedPsi,
    ProductPsi,
    RadialPsi,
    Spectrum,
    build_charseq,
    lattice_ball_count,
    psi_derivative,
    psi_integral,
    rearrangement,
    tail_sum,
)
from spapprox.oracle import oracle_charseq
from spapprox.psi import rearrangement_padded


def test_charseq_geometric_radial_levels():
    psi = RadialPsi(("geom", 0.5), d=1, origin="exact")
    cs = build_charseq(psi, levels=4)
    assert cs.eps == (1.0, 0.5, 0.25, 0.125)
    assert cs.delta == (1, 3, 5, 7)
    assert cs.g(0) == frozenset()
    assert cs.g(2) == {(0,), (1,), (-1,)}


def test_charseq_hyperbolic_counts_match_full_sort():
    hyp = ProductPsi([AxisPow(1), AxisPow(1)])
    cs = build_charseq(hyp, levels=6)
    ocs = oracle_charseq(hyp, 40)
    assert cs.eps[:6] == ocs.eps[:6]
    assert cs.delta[:6] == ocs.delta[:6]
    # first counts of the hyperbolic cross |k1' k2'| <= n
    assert cs.delta[:4] == (9, 21, 33, 49)


def test_charseq_single_level_table():
    t = ExplicitTablePsi({0: 0.5, 1: 0.5, 2: 0.5})
    cs = build_charseq(t, levels=1)
    assert cs.eps == (0.5,) and cs.delta == (3,)
    with pytest.raises(CertificationError):
        build_charseq(t, levels=2)


def test_rearrangement_examples():
    psi = RadialPsi(("pow", 1.0), d=1)
    assert list(rearrangement(psi, 6)) == [1.0, 1.0, 1.0, 0.5, 0.5, 1 / 3]
    assert list(rearrangement(psi, 1)) == [1.0]
    prod = ProductPsi([AxisGeom(0.5), AxisGeom(1 / 3)])
    vals = rearrangement(prod, 200)
    # oracle: full sort over a generous box
    box_vals = sorted(
        (prod.magnitude((a, b)) for a in range(-65, 66) for b in range(-65, 66)),
        reverse=True,
    )[:200]
    assert list(vals) == box_vals
    assert vals[:3].tolist() == [1.0, 0.5, 0.5]


def test_product_stream_nonincreasing_long():
    prod = ProductPsi([AxisPow(1), AxisPow(2)])
    prev = math.inf
    for v, _ in itertools.islice(prod.stream(), 100_000):
        assert v <= prev
        prev = v


def test_product_sign_multiplicities_match_symmetry():
    # distinct axis magnitudes: multiplicity of each level is 2^(d - zeros)
    prod = ProductPsi([AxisGeom(0.5), AxisGeom(1 / 3)])
    cs = build_charseq(prod, levels=8)
    for eps, shell in zip(cs.eps, cs.shells):
        q = sum(1 for x in shell[0] if x == 0)
        assert len(shell) == 2 ** (2 - q)


def test_psi_integral_examples():
    f = Spectrum.lattice({1: 1.0})
    ident = ExplicitTablePsi({k: 1.0 for k in range(-4, 5)})
    assert psi_integral(f, ident) == f
    half = ExplicitTablePsi({1: 0.5})
    assert psi_integral(f, half).coefficient(1) == 0.5 + 0j
    with pytest.raises(InputDomainError):
        psi_derivative(Spectrum.lattice({2: 1.0}), half)


def test_psi_round_trip_exact(rng):
    psi = ProductPsi([AxisPow(1), AxisPow(1)])
    for _ in range(100):
        ks = [tuple(map(int, rng.integers(-6, 7, size=2))) for _ in range(8)]
        f = Spectrum.lattice({k: complex(*rng.normal(size=2)) for k in set(ks)}, d=2)
        back = psi_derivative(psi_integral(f, psi), psi)
        worst = max(abs(back.coefficient(k) - c) for k, c in f.items())
        assert worst < 1e-15


def test_phase_only_changes_transforms(rng):
    base = RadialPsi(("geom", 0.5), d=1, origin="exact")
    phased = PhasedPsi(base, lambda k: complex(math.cos(k[0]), math.sin(k[0])))
    assert build_charseq(phased, levels=3).eps == build_charseq(base, levels=3).eps
    f = Spectrum.lattice({k: complex(*rng.normal(size=2)) for k in range(-3, 4)})
    fi = psi_integral(f, phased)
    for k, c in f.items():
        assert abs(abs(fi.coefficient(k)) - abs(c) * base.magnitude(k)) < 1e-15
    back = psi_derivative(fi, phased)
    assert max(abs(back.coefficient(k) - c) for k, c in f.items()) < 1e-14


def test_lattice_ball_examples():
    assert lattice_ball_count(2, math.inf, 3) == 49
    assert lattice_ball_count(2, 1, 2) == 13
    assert lattice_ball_count(1, 2.7, 5) == 11
    with pytest.raises(BudgetError):
        lattice_ball_count(4, 2, 10 ** 4)


def test_lattice_ball_two_sided_volume_bounds():
    # M_r (m - c1)^d < count <= M_r (m + c2)^d with the unit-ball volumes
    # M_inf = 2^d and M_1 = 2^d / d!; c1 = c2 = 1 works on this range
    for d in (1, 2, 3):
        for r, M in ((math.inf, 2.0 ** d), (1.0, 2.0 ** d / math.factorial(d))):
            for m in (4, 9, 17, 33, 64):
                cnt = lattice_ball_count(d, r, m)
                assert M * (m - 1) ** d < cnt <= M * (m + 1) ** d
        for m in (4, 9, 17, 33, 64):
            cnt = lattice_ball_count(d, 2.0, m)
            ball_vol = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
            assert ball_vol * (m - 1) ** d < cnt <= ball_vol * (m + 1.1) ** d


def test_oracle_charseq_agreement_radial():
    psi = RadialPsi(("pow", 2.0), d=2, r=2.0)
    cs = build_charseq(psi, levels=8)
    ocs = oracle_charseq(psi, 32)
    assert cs.eps[:8] == ocs.eps[:8]
    assert cs.delta[:8] == ocs.delta[:8]


def test_tail_sum_examples():
    val, bound = tail_sum(ExplicitSeqPsi.geometric(0.5, first=0.5), 2.0, 2, tol=1e-12)
    assert val == pytest.approx(1 / 12, abs=1e-14)
    assert bound <= 1e-12
    val, bound = tail_sum(ExplicitSeqPsi.power(2.0), 1.0, 1, tol=1e-8)
    assert val == pytest.approx(math.pi ** 2 / 6, abs=1e-8)
    with pytest.raises(ConvergenceError):
        tail_sum(ExplicitSeqPsi.harmonic(), 0.0, 1)
    with pytest.raises(ConvergenceError):
        tail_sum(ExplicitSeqPsi.harmonic(), 1.0, 1)


def test_tail_sum_product_and_radial():
    # product separability: total = prod of axis sums
    prod = ProductPsi([AxisGeom(0.5), AxisGeom(0.25)])
    val, bound = tail_sum(prod, 1.0, 1, tol=1e-9)
    ax1 = 1 + 2 * 0.5 / (1 - 0.5)
    ax2 = 1 + 2 * 0.25 / (1 - 0.25)
    assert val == pytest.approx(ax1 * ax2, rel=1e-12)
    # radial d=1 power tail vs direct summation
    rad = RadialPsi(("pow", 2.0), d=1)
    val, bound = tail_sum(rad, 1.0, 1, tol=1e-7)
    direct = 1.0 + 2 * sum(k ** -2.0 for k in range(1, 200000))
    assert val == pytest.approx(direct, abs=1e-4)


def test_rearrangement_multiset_matches_box_sort():
    psi = RadialPsi(("pow", 1.0), d=2, r=1.0)
    cs = build_charseq(psi, levels=6)
    vals = sorted(
        (psi.magnitude((a, b)) for a in range(-40, 41) for b in range(-40, 41)),
        reverse=True,
    )
    flat = [e for e, shell in zip(cs.eps, cs.shells) for _ in shell]
    assert flat == vals[: len(flat)]


def test_padded_rearrangement_for_finite_tables():
    t = ExplicitTablePsi({0: 1.0, 1: 0.5})
    assert list(rearrangement_padded(t, 4)) == [1.0, 0.5, 0.0, 0.0]
