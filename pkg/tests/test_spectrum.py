import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spapprox import (
    DifferenceScheme,
    InputDomainError,
    Spectrum,
    apply_difference,
    apply_steklov_difference,
    best_tail_approx,
    difference_multiplier,
    greedy_select,
    partial_sum,
    sp_norm,
    spectrum_from_json_dict,
    spectrum_to_json_dict,
    steklov_multiplier,
)
from spapprox.oracle import oracle_nterm_exhaustive


def test_norm_single_unit_coefficient():
    assert sp_norm(Spectrum.real({1.0: 1.0}), 2) == 1.0


def test_norm_finite_geometric_sum():
    f = Spectrum.lattice({0: 1.0, 1: 0.5, 2: 0.25})
    assert sp_norm(f, 1) == pytest.approx(1.75, abs=0)


def test_norm_two_unit_coefficients():
    f = Spectrum.lattice({-1: 1.0, 1: 1.0})
    assert sp_norm(f, 2) == pytest.approx(math.sqrt(2.0), abs=1e-15)


def test_norm_sup_branch():
    f = Spectrum.lattice({0: 3.0, 5: -4.0})
    assert sp_norm(f, math.inf) == 4.0


def test_norm_rejects_bad_exponent_and_nonfinite():
    with pytest.raises(InputDomainError):
        sp_norm(Spectrum.lattice({0: 1.0}), 0.5)
    with pytest.raises(InputDomainError):
        Spectrum.lattice({0: complex(math.nan, 0)})


def test_partial_sum_examples():
    f = Spectrum.lattice({0: 1.0, 1: 2.0})
    assert partial_sum(f, [0]).as_dict() == {(0,): (1 + 0j)}
    assert partial_sum(f, f.frequencies) == f
    g = Spectrum.lattice({-1: 1j, 1: 1.0, 2: 3.0})
    s = partial_sum(g, lambda k: abs(k[0]) <= 1)
    assert sp_norm(Spectrum.lattice({2: 3.0}), 1) == best_tail_approx(g, lambda k: abs(k[0]) <= 1, 1) == 3.0
    assert set(s.frequencies) == {(-1,), (1,)}


def test_partial_sum_minimality_under_perturbation(rng):
    # keeping the exact coefficient on a retained frequency is strictly optimal
    f = Spectrum.lattice({k: complex(*rng.normal(size=2)) for k in range(-3, 4)})
    region = [(-1,), (0,), (2,)]
    base = best_tail_approx(f, region, 1.7)
    for _ in range(25):
        g = {k: f.coefficient(k) for k in region}
        key = region[rng.integers(0, len(region))]
        g[key] += complex(*(0.2 * rng.normal(size=2) + 0.01))
        diff = Spectrum.lattice(
            {k: c - g.get(k, 0j) for k, c in f.items()} | {k: -c for k, c in g.items() if k not in f}
        )
        assert sp_norm(diff, 1.7) > base


def test_best_tail_examples():
    assert best_tail_approx(Spectrum.lattice({1: 1.0}), [1], 2) == 0.0
    f = Spectrum.lattice({-1: 1.0, 0: 1.0, 1: 1.0})
    assert best_tail_approx(f, [0], 1) == 2.0
    g = Spectrum.lattice({k: 2.0 ** -k for k in range(6)})
    assert best_tail_approx(g, [0, 1], 1) == pytest.approx(0.46875, abs=1e-15)


def test_tail_monotone_in_region(rng):
    f = Spectrum.lattice({k: complex(*rng.normal(size=2)) for k in range(-4, 5)})
    gamma = [(-1,), (2,)]
    larger = gamma + [(0,), (3,)]
    for p in (1.0, 1.5, 2.0, math.inf):
        assert best_tail_approx(f, larger, p) <= best_tail_approx(f, gamma, p) + 1e-15


def test_greedy_examples():
    g = greedy_select(Spectrum.lattice({0: 3.0, 1: 1.0, 2: 2.0}), 2, 1)
    assert g.indices == {(0,), (2,)} and g.value == 1.0 and not g.tie
    f = Spectrum.lattice({0: 3.0, 1: 1.0, 2: 2.0})
    assert greedy_select(f, len(f), 2).value == 0.0


def test_greedy_tie_flag_and_oracle_value():
    # equal magnitudes at the cut: flagged, and the value matches the
    # exhaustive oracle (the value is tie-independent)
    f = Spectrum.lattice({1: 1.0, -1: 1.0, 2: 0.5, -2: 0.5, 3: 0.25, -3: 0.25})
    g = greedy_select(f, 3, 2)
    _, oracle_val = oracle_nterm_exhaustive(f, 3, 2)
    assert g.tie
    assert g.value == pytest.approx(math.sqrt(3.0 / 8.0), abs=1e-15)
    assert g.value == pytest.approx(oracle_val, abs=0)


@given(st.integers(0, 8), st.sampled_from([1.0, 1.5, 2.0]))
@settings(max_examples=40, deadline=None)
def test_greedy_matches_exhaustive_small(n, p):
    rng = np.random.default_rng(n * 17 + int(p * 10))
    keys = rng.choice(np.arange(-6, 7), size=6, replace=False)
    f = Spectrum.lattice({int(k): complex(*rng.normal(size=2)) for k in keys})
    g = greedy_select(f, n, p)
    _, val = oracle_nterm_exhaustive(f, n, p)
    assert g.value == pytest.approx(val, abs=0)


def test_difference_multiplier_examples():
    first = DifferenceScheme((1, -1))
    assert difference_multiplier(first, 1.0, math.pi) == pytest.approx(2.0, abs=1e-15)
    second = DifferenceScheme((1, -2, 1))
    assert difference_multiplier(second, 1.0, math.pi / 2) == pytest.approx(2.0, abs=1e-14)
    assert difference_multiplier(second, 3.7, 0.0) == 0.0


def test_alternating_binomial_multiplier_closed_form():
    ts = np.linspace(0.0, 2 * math.pi, 41)
    for m in range(1, 6):
        scheme = DifferenceScheme.classical(m)
        for t in ts:
            target = (2.0 * abs(math.sin(t / 2.0))) ** m
            assert difference_multiplier(scheme, 1.0, t) == pytest.approx(target, abs=1e-12)


def test_difference_scheme_validation():
    with pytest.raises(InputDomainError):
        DifferenceScheme((1, -0.5))
    with pytest.raises(InputDomainError):
        DifferenceScheme((0, 0))


def test_steklov_multiplier_examples():
    assert steklov_multiplier(1, 1.0, 0.0) == 0.0
    assert steklov_multiplier(1, 1.0, math.pi) == pytest.approx(1.0, abs=1e-15)
    assert steklov_multiplier(2, 1.0, math.pi / 2) == pytest.approx((1 - 2 / math.pi) ** 2, abs=1e-15)


def test_apply_steklov_matches_multiplier(rng):
    f = Spectrum.real({0.0: 1.0, 1.5: 0.5 + 0.25j, -2.0: 0.125})
    for m in (1, 2, 3):
        for h in (0.3, 1.1):
            g = apply_steklov_difference(f, m, h)
            for (k, c), lam in zip(f.items(), f.scalar_frequencies()):
                assert abs(abs(g.coefficient(k)) - steklov_multiplier(m, float(lam), h) * abs(c)) < 1e-15


def test_json_round_trip_and_duplicate_rejection():
    f = Spectrum.lattice({(1, 0): 1.0, (0, 1): 1j}, d=2)
    doc = spectrum_to_json_dict(f)
    assert spectrum_from_json_dict(doc) == f
    g = Spectrum.real({1.5: 1.0 - 0.5j})
    assert spectrum_from_json_dict(spectrum_to_json_dict(g)) == g
    bad = {"kind": "lattice", "d": 1, "entries": [
        {"k": [1], "re": 1.0, "im": 0.0}, {"k": [1], "re": 2.0, "im": 0.0}]}
    with pytest.raises(Exception):
        spectrum_from_json_dict(bad)


def test_spectrum_never_mixes_kinds():
    with pytest.raises(InputDomainError):
        Spectrum("real", {}, d=2)
    with pytest.raises(InputDomainError):
        Spectrum.lattice({(1, 2): 1.0, (3,): 1.0})
