"""Exact class-level approximation quantities over psi-integral balls.

The function class is the set of psi-integrals of the unit ball of the
exponent-q coefficient space: coefficient sequences lying in the ellipsoid
``sum |a_k / psi(k)|^q <= 1``.  Approximation takes place in the exponent-p
metric.  Everything reduces to the decreasing rearrangement of |psi|:

* best approximation by spectra outside a fixed index set, or by the
  characteristic level sets (level n means frequencies of the first n-1
  levels are available to the approximant);
* trigonometric / projection widths of order n (arbitrary n-point sets);
* Kolmogorov width ladders: for p = q the width is constant between
  consecutive cumulative level counts;
* best n-term approximation: a scanned supremum over the head length s with
  a certified early stop;
* empirical order-estimate checks for radial profile classes.

Two regimes apply: q <= p uses only positivity + vanishing of psi; q > p
additionally needs the summability of |psi|^{pq/(q-p)}, certified through
the tail-sum machinery before any formula runs.

The direct/inverse series identities relating tails of a function and of its
psi-derivative are implemented with a configurable indexing convention; the
shipped default (tail over levels >= n, factor indices as displayed) is the
one under which symbolic Abel summation makes both identities exact, and the
convention-pinning gate in the test suite enforces it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    BudgetError,
    ConvergenceError,
    InputDomainError,
    PreconditionError,
)
from .psi import (
    CharSeq,
    ExplicitTablePsi,
    ExplicitSeqPsi,
    PsiSystem,
    RadialPsi,
    build_charseq,
    psi_derivative,
    rearrangement_padded,
    tail_sum,
)
from .reports import ExtremalReport
from .spectrum import Spectrum

SIGMA_SCAN_BUDGET = 1_000_000


@dataclass
class ClassSpec:
    """Class data: the multiplier system and the exponent pair (p, q)."""

    psi: PsiSystem
    p: float
    q: float
    tail_tol: float = 1e-9

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise InputDomainError("exponents p, q must be positive")
        self._w21: tuple[float, float] | None = None

    @property
    def regime(self) -> str:
        return "q<=p" if self.q <= self.p else "q>p"

    @property
    def tail_exponent(self) -> float:
        if self.q <= self.p:
            raise InputDomainError("tail exponent defined only for q > p")
        return self.p * self.q / (self.q - self.p)

    def certify_summability(self) -> tuple[float, float]:
        """For q > p: certify sum |psi|^{pq/(q-p)} < infinity (value, bound)."""
        if self.q <= self.p:
            raise InputDomainError("no summability condition needed for q <= p")
        if self._w21 is None:
            try:
                self._w21 = tail_sum(self.psi, self.tail_exponent, 1, tol=self.tail_tol)
            except ConvergenceError as e:
                raise PreconditionError(
                    f"summability of |psi|^(pq/(q-p)) not certified: {e}"
                ) from e
        return self._w21

    def grade_warnings(self) -> tuple:
        if not self.psi.theorem_grade:
            return (
                "psi violates the everywhere-nonzero/vanishing hypotheses "
                "(test-only explicit system); theorem-level values are formal",
            )
        return ()


class _RearrCache:
    """Lazily materialized decreasing rearrangement with cumulative sums."""

    def __init__(self, psi: PsiSystem):
        self._iter = psi.stream()
        self._vals: list[float] = []
        self._exhausted = False

    def upto(self, k: int) -> np.ndarray:
        while len(self._vals) < k and not self._exhausted:
            try:
                v, _ = next(self._iter)
                self._vals.append(v)
            except StopIteration:
                self._exhausted = True
        if len(self._vals) >= k:
            return np.array(self._vals[:k], dtype=np.float64)
        out = np.zeros(k, dtype=np.float64)
        out[: len(self._vals)] = self._vals
        return out

    def value(self, j: int) -> float:
        arr = self.upto(j)
        return float(arr[j - 1])


# ---------------------------------------------------------------------------
# best approximations and widths


def _tail_norm_outside(spec: ClassSpec, excluded: frozenset) -> tuple[float, dict]:
    e = spec.tail_exponent
    total, bound = spec.certify_summability()
    head = math.fsum(spec.psi.magnitude(k) ** e for k in excluded)
    val = max(total - head, 0.0) ** (1.0 / e)
    return val, {"tail_exponent": e, "tail_bound": bound}


def class_best_approx(
    spec: ClassSpec,
    gamma: Iterable | None = None,
    level: int | None = None,
) -> ExtremalReport:
    """Best (and projective) approximation of the class.

    With ``gamma``: approximants are supported on the given index set; the
    value is the largest remaining |psi| (q <= p) or the tail norm of the
    rearrangement outside gamma with exponent pq/(q-p) (q > p).

    With ``level`` n >= 1: approximants use the union of the first n-1
    characteristic level sets; the value is eps_n (q <= p) or the
    rearrangement tail from position delta_{n-1}+1 (q > p).
    """
    if (gamma is None) == (level is None):
        raise InputDomainError("pass exactly one of gamma / level")
    warnings = spec.grade_warnings()
    if gamma is not None:
        gset = frozenset(spec.psi.key(k) for k in gamma)
        if spec.q <= spec.p:
            for v, k in spec.psi.stream():
                if k not in gset:
                    return ExtremalReport(
                        "best_approx", v, n=len(gset), regime=spec.regime,
                        certificate={"form": "set", "attained_at": list(k)},
                        warnings=warnings,
                    )
            return ExtremalReport(
                "best_approx", 0.0, n=len(gset), regime=spec.regime,
                certificate={"form": "set", "note": "psi exhausted inside gamma"},
                warnings=warnings,
            )
        val, cert = _tail_norm_outside(spec, gset)
        cert["form"] = "set"
        return ExtremalReport(
            "best_approx", val, n=len(gset), regime=spec.regime,
            certificate=cert, warnings=warnings,
        )
    if level < 1:
        raise InputDomainError("level must be >= 1")
    cs = build_charseq(spec.psi, levels=level)
    if spec.q <= spec.p:
        return ExtremalReport(
            "best_approx", cs.eps[level - 1], n=level, regime=spec.regime,
            certificate={"form": "level"}, warnings=warnings,
        )
    e = spec.tail_exponent
    spec.certify_summability()
    start = 1 if level == 1 else cs.delta[level - 2] + 1
    val, bound = tail_sum(spec.psi, e, start, tol=spec.tail_tol)
    return ExtremalReport(
        "best_approx", val ** (1.0 / e), n=level, regime=spec.regime,
        certificate={"form": "level", "tail_exponent": e, "tail_bound": bound,
                     "tail_from": start},
        warnings=warnings,
    )


def class_widths(spec: ClassSpec, n: int) -> ExtremalReport:
    """Trigonometric (basis) and projection width of order n: optimize the
    approximating n-point frequency set.  Equals the (n+1)-st rearrangement
    value (q <= p) or the rearrangement tail beyond position n (q > p)."""
    if n < 0:
        raise InputDomainError("width order n must be >= 0")
    warnings = spec.grade_warnings()
    if spec.q <= spec.p:
        val = float(rearrangement_padded(spec.psi, n + 1)[n])
        return ExtremalReport(
            "width", val, n=n, regime=spec.regime,
            certificate={"rearrangement_index": n + 1}, warnings=warnings,
        )
    e = spec.tail_exponent
    spec.certify_summability()
    val, bound = tail_sum(spec.psi, e, n + 1, tol=spec.tail_tol)
    return ExtremalReport(
        "width", val ** (1.0 / e), n=n, regime=spec.regime,
        certificate={"tail_exponent": e, "tail_bound": bound, "tail_from": n + 1},
        warnings=warnings,
    )


def kolmogorov_ladder(spec: ClassSpec, n: int) -> ExtremalReport:
    """Kolmogorov widths for p = q: the width is eps_n for every dimension
    N in [delta_{n-1}, delta_n - 1]."""
    if spec.p != spec.q:
        raise PreconditionError("the Kolmogorov ladder requires p = q")
    if not 1 <= spec.p < math.inf:
        raise PreconditionError("the Kolmogorov ladder requires p in [1, inf)")
    if n < 1:
        raise InputDomainError("level must be >= 1")
    cs = build_charseq(spec.psi, levels=n)
    lo = 0 if n == 1 else cs.delta[n - 2]
    hi = cs.delta[n - 1] - 1
    return ExtremalReport(
        "kolmogorov_width", cs.eps[n - 1], n=n, regime="p=q",
        certificate={"dimension_range": [lo, hi]}, warnings=spec.grade_warnings(),
    )


# ---------------------------------------------------------------------------
# best n-term approximation of the class


def class_sigma(
    spec: ClassSpec,
    n: int,
    budget: int = SIGMA_SCAN_BUDGET,
    chunk: int = 4096,
) -> ExtremalReport:
    """Best n-term approximation of the class.

    q <= p: sigma^p = sup_{s>n} (s-n) (sum_{k<=s} rr_k^{-q})^{-p/q}; the scan
    stops once the envelope 2^{p/q} s^{1-p/q} rr_{ceil(s/2)}^p (nonincreasing
    for q <= p, dominating the objective) falls below the incumbent.

    q > p: sigma^{p...}: the bracket (s-n)^{q/(q-p)} (sum_{k<=s}
    rr_k^{-q})^{-p/(q-p)} + tail_{s+1}(pq/(q-p)) is maximized over s and the
    result is raised to (q-p)/(pq); the stop certificate combines two
    certified tail sums.  The head-length rule (maximize the bracket) is
    cross-checked by the ellipsoid search oracle in the test suite.
    """
    if n < 1:
        raise InputDomainError("n must be >= 1")
    warnings = spec.grade_warnings()
    cache = _RearrCache(spec.psi)
    qexp = spec.q
    best = -math.inf
    best_s = None
    stop_reason = None

    if spec.regime == "q>p":
        e = spec.tail_exponent
        total, tbound = spec.certify_summability()
        expo_head = spec.q / (spec.q - spec.p)
        expo_sum = spec.p / (spec.q - spec.p)

    def inv_power(v: float) -> float:
        if v <= 0.0:
            return math.inf
        try:
            return v ** (-qexp)
        except OverflowError:
            return math.inf

    s_hi = n
    step = 64
    inv_cum = 0.0
    e_cum = 0.0
    inv_cums: list[float] = []  # cumulative rr^{-q}, 1-based
    e_cums: list[float] = []  # cumulative rr^{e} (q > p only)
    while s_hi - n < budget:
        s_lo = s_hi + 1
        s_hi = min(s_hi + step, n + budget)
        step = min(2 * step, chunk)
        vals = cache.upto(s_hi)
        while len(inv_cums) < s_hi:
            j = len(inv_cums)
            v = float(vals[j])
            inv_cum += inv_power(v)
            inv_cums.append(inv_cum)
            if spec.regime == "q>p":
                e_cum += v ** e if v > 0.0 else 0.0
                e_cums.append(e_cum)
        ss = np.arange(s_lo, s_hi + 1, dtype=np.float64)
        cums = np.array(inv_cums[s_lo - 1: s_hi], dtype=np.float64)
        with np.errstate(over="ignore"):
            if spec.regime == "q<=p":
                obj = (ss - n) * np.where(
                    np.isfinite(cums), cums, np.inf
                ) ** (-spec.p / spec.q)
            else:
                tails = np.maximum(
                    total - np.array(e_cums[s_lo - 1: s_hi], dtype=np.float64), 0.0
                )
                obj = (ss - n) ** expo_head * np.where(
                    np.isfinite(cums), cums, np.inf
                ) ** (-expo_sum) + tails
        obj = np.where(np.isfinite(obj), obj, 0.0)
        i = int(np.argmax(obj))
        if float(obj[i]) > best:
            best = float(obj[i])
            best_s = int(ss[i])
        # certified early stop
        mid = cache.value(max(1, (s_hi + 1) // 2))
        if spec.regime == "q<=p":
            env = (
                2.0 ** (spec.p / spec.q)
                * float(s_hi) ** (1.0 - spec.p / spec.q)
                * mid ** spec.p
            )
            if env < best:
                stop_reason = {"stop": "envelope", "envelope": env, "at_s": s_hi}
                break
            if mid == 0.0 and best >= 0.0:
                stop_reason = {"stop": "support-exhausted", "at_s": s_hi}
                break
        else:
            t_quarter = max(total - (e_cums[max(0, (s_hi + 3) // 4 - 1)]), 0.0)
            t_next = max(total - e_cums[s_hi - 1], 0.0)
            env = 2.0 ** (expo_sum + 2.0) * t_quarter + t_next
            if env < best:
                stop_reason = {"stop": "tail-envelope", "envelope": env, "at_s": s_hi}
                break
    else:
        raise BudgetError(
            f"n-term scan not certified within {budget} candidates (best so far "
            f"{best:.6g} at s={best_s})"
        )

    if best <= 0.0:
        best, best_s = 0.0, None
    if spec.regime == "q<=p":
        value = best ** (1.0 / spec.p) if best > 0 else 0.0
    else:
        value = best ** ((spec.q - spec.p) / (spec.p * spec.q)) if best > 0 else 0.0
        stop_reason = dict(stop_reason or {})
        stop_reason["summability_bound"] = tbound
    cert = {"scan_budget": budget, **(stop_reason or {})}
    return ExtremalReport(
        "sigma", value, n=n, s_star=best_s, regime=spec.regime,
        certificate=cert, warnings=warnings,
    )


# ---------------------------------------------------------------------------
# empirical order-estimate checks for radial profile classes


@dataclass
class OrderCheckReport:
    ratios: dict
    band: tuple[float, float]
    band_quotient: float
    bounded: bool
    delta2_ok: bool
    delta2_max_ratio: float
    warnings: tuple = ()


def dyadic_doubling_check(fn: Callable[[float], float], levels: int = 21) -> tuple[bool, float]:
    """Check fn(t) <= K fn(2t) on the dyadic grid t = 2^j, j = 0..levels-1.

    Returns (ok, max ratio).  The condition fails empirically when the
    ratios keep growing across the top of the grid (no uniform K exists)."""
    ratios = []
    for j in range(levels):
        t = 2.0 ** j
        a, b = fn(t), fn(2.0 * t)
        if b <= 0 or not math.isfinite(a / b):
            return False, math.inf
        ratios.append(a / b)
    tail = ratios[-8:]
    growing = all(y > x * (1 + 1e-9) for x, y in zip(tail, tail[1:]))
    exploding = ratios[-1] > 10.0 * max(ratios[0], ratios[len(ratios) // 2])
    return not (growing and exploding), max(ratios)


def order_estimate_check(
    psi_func: Callable[[float], float],
    d: int,
    r: float,
    p: float,
    q: float,
    n_range: Sequence[int],
    band_factor: float = 10.0,
    power_bound: tuple[float, float, float] | None = None,
) -> OrderCheckReport:
    """Empirical two-sided order check: the exact n-term values of the radial
    profile class should stay within a fixed band of psi(n^{1/d}) n^{1/p-1/q}
    over the requested range.  The doubling condition on psi^p is verified on
    a dyadic grid first (a failure is reported, not fatal)."""
    warnings: list[str] = []
    delta2_ok, delta2_max = dyadic_doubling_check(lambda t: psi_func(t) ** p)
    if not delta2_ok:
        warnings.append("profile fails the dyadic doubling condition; order "
                        "estimates are not guaranteed")
    psi = RadialPsi(psi_func, d=d, r=r, power_bound=power_bound)
    spec = ClassSpec(psi, p, q)
    ratios: dict[int, float] = {}
    for n in n_range:
        sig = class_sigma(spec, n)
        target = psi_func(float(n) ** (1.0 / d)) * float(n) ** (1.0 / p - 1.0 / q)
        ratios[n] = sig.value / target
    lo, hi = min(ratios.values()), max(ratios.values())
    quot = hi / lo if lo > 0 else math.inf
    return OrderCheckReport(
        ratios=ratios,
        band=(lo, hi),
        band_quotient=quot,
        bounded=quot < band_factor,
        delta2_ok=delta2_ok,
        delta2_max_ratio=delta2_max,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# direct / inverse series identities


@dataclass(frozen=True)
class IdentityConvention:
    """Indexing convention for the series identities.

    ``tail_offset`` shifts which levels count as the tail: the level-m best
    approximation uses levels >= m + tail_offset.  ``eps_offset`` shifts the
    level-value indices appearing as factors.  The shipped default (0, 0),
    i.e. tail over levels >= m with factors as displayed, is exact."""

    eps_offset: int = 0
    tail_offset: int = 0


DEFAULT_CONVENTION = IdentityConvention()


@dataclass
class IdentityResult:
    lhs: float
    rhs: float
    residual: float
    convention: IdentityConvention
    convergence_ok: bool = True


def _shell_power_sums(
    f: Spectrum, psi: PsiSystem, p: float, min_levels: int = 1
) -> tuple[dict, CharSeq]:
    mags = [psi.magnitude(k) for k in f.frequencies]
    positive = [m for m in mags if m > 0]
    if len(positive) < len(mags):
        raise PreconditionError("psi vanishes on part of the support")
    from .errors import CertificationError

    try:
        if positive:
            cs = build_charseq(psi, levels=min_levels, down_to_value=min(positive))
        else:
            cs = build_charseq(psi, levels=min_levels)
    except CertificationError:
        # finite system with fewer levels than requested: take all of them
        cs = build_charseq(psi, down_to_value=0.0)
    sums: dict[int, list] = {}
    for (k, c), m in zip(f.items(), mags):
        lvl = cs.level_of_value(m)
        sums.setdefault(lvl, []).append(abs(c) ** p)
    return {lvl: math.fsum(vals) for lvl, vals in sums.items()}, cs


def _suffix(sums: dict, m: int) -> float:
    return math.fsum(v for lvl, v in sums.items() if lvl >= m)


def direct_identity_check(
    f: Spectrum,
    psi: PsiSystem,
    n: int,
    convention: IdentityConvention = DEFAULT_CONVENTION,
    p: float = 1.0,
) -> IdentityResult:
    """Level-n tail of f versus the level-value-weighted series of the tails
    of its psi-derivative: lhs = E_n^p(f) and

        rhs = eps_n^p E_n^p(f') + sum_{k>n} (eps_k^p - eps_{k-1}^p) E_k^p(f')

    where f' is the psi-derivative and E_m^p sums coefficient powers over
    levels >= m (+ configured offsets).  Exact for the shipped convention."""
    if n < 1:
        raise InputDomainError("n must be >= 1")
    fd = psi_derivative(f, psi)
    sums_f, cs = _shell_power_sums(f, psi, p, min_levels=n + 2)
    sums_d, _ = _shell_power_sums(fd, psi, p)
    K = max(sums_f, default=0)

    def eps_pow(i: int, power: float) -> float:
        j = i + convention.eps_offset
        if j < 1:
            return math.nan
        if j > cs.n_levels:
            raise PreconditionError("characteristic data does not reach the required depth")
        return cs.eps[j - 1] ** power

    def tail(sums: dict, m: int) -> float:
        return _suffix(sums, max(1, m + convention.tail_offset))

    lhs = tail(sums_f, n)
    if lhs == 0.0 and tail(sums_d, n) == 0.0:
        return IdentityResult(0.0, 0.0, 0.0, convention)
    terms = [eps_pow(n, p) * tail(sums_d, n)]
    for k in range(n + 1, K + abs(convention.tail_offset) + 2):
        t = tail(sums_d, k)
        if t == 0.0:
            break
        terms.append((eps_pow(k, p) - eps_pow(k - 1, p)) * t)
    rhs = math.fsum(terms)
    return IdentityResult(lhs, rhs, abs(lhs - rhs), convention)


def inverse_identity_check(
    f: Spectrum,
    psi: PsiSystem,
    n: int,
    convention: IdentityConvention = DEFAULT_CONVENTION,
    p: float = 1.0,
) -> IdentityResult:
    """Mirror identity with reciprocal level-value powers:

        lhs = E_n^p(f'),  rhs = eps_n^{-p} E_n^p(f)
                                + sum_{k>n} (eps_k^{-p} - eps_{k-1}^{-p}) E_k^p(f)

    The smallness hypothesis (level-value-normalized tails of f vanish) holds
    automatically for finite spectra and is reported as ``convergence_ok``."""
    if n < 1:
        raise InputDomainError("n must be >= 1")
    fd = psi_derivative(f, psi)
    sums_f, cs = _shell_power_sums(f, psi, p, min_levels=n + 2)
    sums_d, _ = _shell_power_sums(fd, psi, p)
    K = max(sums_f, default=0)

    def eps_pow(i: int, power: float) -> float:
        j = i + convention.eps_offset
        if j < 1:
            return math.nan
        if j > cs.n_levels:
            raise PreconditionError("characteristic data does not reach the required depth")
        return cs.eps[j - 1] ** power

    def tail(sums: dict, m: int) -> float:
        return _suffix(sums, max(1, m + convention.tail_offset))

    lhs = tail(sums_d, n)
    if lhs == 0.0 and tail(sums_f, n) == 0.0:
        return IdentityResult(0.0, 0.0, 0.0, convention, True)
    terms = [eps_pow(n, -p) * tail(sums_f, n)]
    for k in range(n + 1, K + abs(convention.tail_offset) + 2):
        t = tail(sums_f, k)
        if t == 0.0:
            break
        terms.append((eps_pow(k, -p) - eps_pow(k - 1, -p)) * t)
    rhs = math.fsum(terms)
    # finite spectra: tails vanish beyond the deepest occupied level
    convergence_ok = tail(sums_f, K + 1 - convention.tail_offset) == 0.0
    return IdentityResult(lhs, rhs, abs(lhs - rhs), convention, convergence_ok)


def pin_convention(
    cases: Sequence[tuple[Spectrum, PsiSystem, int]],
    p: float = 1.0,
    tol: float = 1e-12,
) -> list[tuple[IdentityConvention, float]]:
    """Rank candidate index conventions by worst-case residual over the given
    cases (both identities).  Offsets range over {0, +-1}^2; combinations that
    need undefined level values are reported with infinite residual."""
    results = []
    for eo, to in itertools.product((-1, 0, 1), repeat=2):
        conv = IdentityConvention(eps_offset=eo, tail_offset=to)
        worst = 0.0
        for f, psi, n in cases:
            try:
                r1 = direct_identity_check(f, psi, n, conv, p)
                r2 = inverse_identity_check(f, psi, n, conv, p)
            except (PreconditionError, InputDomainError):
                worst = math.inf
                break
            scale = max(1.0, abs(r1.lhs), abs(r2.lhs))
            resid = max(r1.residual, r2.residual) / scale
            if math.isnan(resid):
                resid = math.inf
            worst = max(worst, resid)
        results.append((conv, worst))
    results.sort(key=lambda cw: cw[1])
    return results
