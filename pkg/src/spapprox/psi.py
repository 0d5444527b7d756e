"""Vanishing multiplier systems on the integer lattice.

A psi-system assigns a positive magnitude |psi(k)| to every lattice index,
with |psi(k)| -> 0 at infinity.  Its characteristic data -- the distinct
magnitudes in decreasing order (``eps``), their level sets (``g_n``) and the
cumulative counts (``delta``) -- drive every class-level formula in the
library.  Three variants are provided:

* ``ProductPsi``  -- per-axis one-dimensional factors (power or geometric);
  the level sets of the all power(-1) system are hyperbolic crosses.
* ``RadialPsi``   -- psi(k) = g(|k|_r) for a decreasing scalar profile g.
* Explicit systems: a finite lattice table with zero tail (a testing
  convenience that violates the everywhere-nonzero hypothesis and is flagged
  as such), or a one-dimensional sequence form whose decreasing rearrangement
  is given directly (power / geometric closed forms, or a head table with a
  tail rule).

Enumeration of the decreasing rearrangement is lazy and *certified*: a value
is emitted only once the variant's tail bound proves that no unscanned index
can exceed it.  Magnitudes are evaluated in a canonical order (integer
accumulation where possible) so that equal-by-construction values compare
equal as doubles; level grouping uses exact comparison.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    BudgetError,
    CertificationError,
    ConvergenceError,
    InputDomainError,
)
from .spectrum import Spectrum

# Default certification boxes (sup-norm radius) per dimension.
DEFAULT_MAX_BOX = {1: 2 ** 20, 2: 2 ** 10, 3: 2 ** 7}


def default_max_box(d: int) -> int:
    return DEFAULT_MAX_BOX.get(d, 2 ** 5)


# ---------------------------------------------------------------------------
# lattice norms and counting


def lattice_norm(k: Sequence[int], r: float) -> float:
    """|k|_r with canonical evaluation: components are sorted descending and
    integer powers are accumulated in exact integer arithmetic, so equal
    multisets of coordinates always produce the identical double."""
    mags = sorted((abs(int(x)) for x in k), reverse=True)
    if r == math.inf:
        return float(mags[0]) if mags else 0.0
    if r <= 0:
        raise InputDomainError(f"norm order must be in (0, inf], got {r}")
    ri = int(r)
    if ri == r and ri <= 6:
        total = sum(m ** ri for m in mags)
        if ri == 1:
            return float(total)
        return float(total) ** (1.0 / ri)
    return float(sum(float(m) ** r for m in mags)) ** (1.0 / r)


def lattice_ball_count(d: int, r: float, m: float, budget: int = 2 ** 31) -> int:
    """Exact number of lattice points with |k|_r <= m."""
    if d < 1:
        raise InputDomainError("dimension must be >= 1")
    if m < 0:
        return 0
    if r != math.inf and r <= 0:
        raise InputDomainError(f"norm order must be in (0, inf], got {r}")
    if d * (2 * m + 1) ** d > budget:
        raise BudgetError(
            f"lattice ball enumeration d={d}, m={m} exceeds work budget {budget}"
        )
    mf = math.floor(m)
    if d == 1:
        return 2 * mf + 1
    if r == math.inf:
        return (2 * mf + 1) ** d

    ri = int(r)
    exact = ri == r and ri <= 6

    def kmax_for(rem) -> int:
        # largest t >= 0 with t^r <= rem (exact integer compare when possible)
        if rem < 0:
            return -1
        t = int(float(rem) ** (1.0 / r))
        if exact:
            while (t + 1) ** ri <= rem:
                t += 1
            while t > 0 and t ** ri > rem:
                t -= 1
        else:
            while float(t + 1) ** r <= rem:
                t += 1
            while t > 0 and float(t) ** r > rem:
                t -= 1
        return t

    def count(dim: int, rem) -> int:
        if dim == 1:
            t = kmax_for(rem)
            return 0 if t < 0 else 2 * t + 1
        top = kmax_for(rem)
        if top < 0:
            return 0
        total = count(dim - 1, rem)  # k = 0 slab
        for k in range(1, top + 1):
            total += 2 * count(dim - 1, rem - k ** ri if exact else rem - float(k) ** r)
        return total

    if exact and float(m).is_integer():
        rem0 = int(round(m)) ** ri
    else:
        rem0 = float(m) ** r
    return count(d, rem0)


def _power_tail(s: float, K: int) -> tuple[float, float]:
    """(estimate, rigorous bound on |error|) for sum_{k>K} k^{-s}, s > 1."""
    if s <= 1:
        raise ConvergenceError(f"power tail diverges for exponent {s} <= 1")
    est = (K + 0.5) ** (1.0 - s) / (s - 1.0)
    bound = s / 24.0 * (K - 0.5) ** (-s - 1.0) if K >= 1 else math.inf
    return est, bound


def _poly_geom_tail(dpow: int, x: float, B: int) -> float:
    """Upper bound for sum_{m>B} m^dpow * x^m with 0 < x < 1."""
    # m^dpow <= (B+1)^dpow * rho^(m-B-1) with rho = ((B+2)/(B+1))^dpow
    rho = ((B + 2.0) / (B + 1.0)) ** dpow
    if x * rho >= 1.0:
        raise ConvergenceError("geometric tail bound unavailable (ratio >= 1)")
    return (B + 1.0) ** dpow * x ** (B + 1) / (1.0 - x * rho)


# ---------------------------------------------------------------------------
# product axes


class AxisPow:
    """One-axis factor value(0) = 1, value(k) = |k|^{-beta}, beta > 0."""

    def __init__(self, beta: float):
        if not beta > 0:
            raise InputDomainError("axis power exponent must be positive")
        self.beta = float(beta)

    def weight(self, k: int) -> float:
        """Canonical reciprocal weight |k|'^beta (exact for beta = 1)."""
        kp = max(abs(k), 1)
        if self.beta == 1.0:
            return float(kp)
        return float(kp) ** self.beta

    def value(self, k: int) -> float:
        return 1.0 / self.weight(k)

    @property
    def max_value(self) -> float:
        return 1.0

    def tail_sup(self, R: int) -> float:
        return float(max(R, 1)) ** (-self.beta)

    def power_sum(self, e: float) -> tuple[float, float]:
        s = self.beta * e
        if s <= 1:
            raise ConvergenceError(
                f"axis power sum diverges: beta*e = {s} <= 1"
            )
        K = 20000
        partial = math.fsum(float(k) ** (-s) for k in range(1, K + 1))
        tail, bound = _power_tail(s, K)
        return 1.0 + 2.0 * (partial + tail), 2.0 * bound

    def describe(self) -> str:
        return f"pow(-{self.beta:g})"


class AxisGeom:
    """One-axis factor value(k) = ratio^{|k|}, 0 < ratio < 1."""

    def __init__(self, ratio: float):
        if not 0 < ratio < 1:
            raise InputDomainError("axis geometric ratio must be in (0, 1)")
        self.ratio = float(ratio)

    def value(self, k: int) -> float:
        return self.ratio ** abs(k)

    @property
    def max_value(self) -> float:
        return 1.0

    def tail_sup(self, R: int) -> float:
        return self.ratio ** max(R, 0)

    def power_sum(self, e: float) -> tuple[float, float]:
        x = self.ratio ** e
        return 1.0 + 2.0 * x / (1.0 - x), 0.0

    def describe(self) -> str:
        return f"geom({self.ratio:g})"


def _axis_canonical_order() -> Iterator[int]:
    """0, -1, 1, -2, 2, ... (value-descending order for symmetric axes)."""
    yield 0
    for k in itertools.count(1):
        yield -k
        yield k


def _seq_position(k: int) -> int:
    """Canonical 1-based position of lattice index k in 0, -1, 1, -2, 2, ..."""
    if k == 0:
        return 1
    return 2 * abs(k) if k < 0 else 2 * k + 1


# ---------------------------------------------------------------------------
# psi-system variants


class PsiSystem:
    """Common interface; see module docstring for the variants."""

    d: int
    variant: str
    theorem_grade: bool  # satisfies nonzero + vanishing hypotheses everywhere
    max_box: int

    def magnitude(self, k) -> float:
        raise NotImplementedError

    def phase(self, k) -> complex:
        return 1.0 + 0.0j

    def value(self, k) -> complex:
        return self.phase(k) * self.magnitude(k)

    def stream(self) -> Iterator[tuple[float, tuple]]:
        """Lazy certified (magnitude, index) pairs in nonincreasing order."""
        raise NotImplementedError

    def power_sum_total(self, e: float) -> tuple[float, float]:
        """(sum over Z^d of magnitude^e, rigorous error bound)."""
        raise NotImplementedError

    def nu(self, n: int) -> float:
        """sup of magnitude over |k| >= n (one-dimensional systems)."""
        if self.d != 1:
            raise InputDomainError("nu(n) requires a one-dimensional system")
        return max(self.magnitude((n,)), self.magnitude((-n,)))

    def key(self, k) -> tuple:
        if isinstance(k, (int, np.integer)):
            return (int(k),)
        return tuple(int(x) for x in k)

    def describe(self) -> str:
        return self.variant


class ProductPsi(PsiSystem):
    def __init__(self, axes: Sequence, max_box: int | None = None):
        if not axes:
            raise InputDomainError("product system needs at least one axis")
        self.axes = list(axes)
        self.d = len(axes)
        self.variant = "product[" + ",".join(a.describe() for a in self.axes) + "]"
        self.theorem_grade = True
        self.max_box = max_box or default_max_box(self.d)
        self._all_pow = all(isinstance(a, AxisPow) for a in self.axes)
        self._all_geom_same = (
            all(isinstance(a, AxisGeom) for a in self.axes)
            and len({a.ratio for a in self.axes}) == 1
        )

    def magnitude(self, k) -> float:
        k = self.key(k)
        if len(k) != self.d:
            raise InputDomainError(f"index {k} has wrong dimension for d={self.d}")
        if self._all_pow:
            w = 1.0
            for a, kj in zip(self.axes, k):
                w *= a.weight(kj)
            return 1.0 / w
        if self._all_geom_same:
            return self.axes[0].ratio ** sum(abs(x) for x in k)
        v = 1.0
        for a, kj in zip(self.axes, k):
            v *= a.value(kj)
        return v

    def _axis_positions(self, j: int, upto: int) -> list[int]:
        gen = _axis_canonical_order()
        return [next(gen) for _ in range(upto)]

    def stream(self) -> Iterator[tuple[float, tuple]]:
        # sorted-product enumeration: a max-heap over per-axis position
        # vectors, deduplicated by position (distinct indices may share
        # values, so the visited set is keyed by index, never by value)
        orders = [list(itertools.islice(_axis_canonical_order(), 4)) for _ in range(self.d)]
        gens = [_axis_canonical_order() for _ in range(self.d)]
        for g, o in zip(gens, orders):
            for _ in range(len(o)):
                next(g)

        def axis_index(j: int, pos: int) -> int:
            o, g = orders[j], gens[j]
            while len(o) <= pos:
                o.append(next(g))
            return o[pos]

        def point(pos: tuple[int, ...]) -> tuple:
            return tuple(axis_index(j, pj) for j, pj in enumerate(pos))

        start = (0,) * self.d
        heap = [(-self.magnitude(point(start)), start)]
        visited = {start}
        while heap:
            negv, pos = heapq.heappop(heap)
            yield -negv, point(pos)
            for j in range(self.d):
                child = pos[:j] + (pos[j] + 1,) + pos[j + 1:]
                if child not in visited:
                    visited.add(child)
                    heapq.heappush(heap, (-self.magnitude(point(child)), child))

    def power_sum_total(self, e: float) -> tuple[float, float]:
        total, rel_hi, rel_lo = 1.0, 1.0, 1.0
        for a in self.axes:
            v, b = a.power_sum(e)
            total *= v
            rel_hi *= 1.0 + b / v
            rel_lo *= max(0.0, 1.0 - b / v)
        return total, total * max(rel_hi - 1.0, 1.0 - rel_lo)

    def tail_sup_outside(self, R: int) -> float:
        best = 0.0
        for j, a in enumerate(self.axes):
            other = 1.0
            for i, b in enumerate(self.axes):
                if i != j:
                    other *= b.max_value
            best = max(best, a.tail_sup(R + 1) * other)
        return best


class RadialPsi(PsiSystem):
    """psi(k) = profile(|k|_r) with a positive nonincreasing profile;
    profile(0) is read as profile(1)."""

    def __init__(
        self,
        profile: Callable[[float], float] | tuple,
        d: int,
        r: float = math.inf,
        max_box: int | None = None,
        power_bound: tuple[float, float, float] | None = None,
        origin: str = "clamp",
    ):
        self.d = int(d)
        self.r = float(r) if r != math.inf else math.inf
        self.max_box = max_box or default_max_box(self.d)
        if origin not in ("clamp", "exact"):
            raise InputDomainError("origin must be 'clamp' or 'exact'")
        self.origin = origin
        self.form: tuple | None = None
        if isinstance(profile, tuple):
            self.form = profile
            kind = profile[0]
            if kind == "pow":
                beta = float(profile[1])
                if beta <= 0:
                    raise InputDomainError("radial power exponent must be positive")
                self._func = lambda t: float(t) ** (-beta)
            elif kind == "geom":
                rho = float(profile[1])
                if not 0 < rho < 1:
                    raise InputDomainError("radial geometric ratio must be in (0,1)")
                self._func = lambda t: rho ** float(t)
            else:
                raise InputDomainError(f"unknown radial profile form {kind!r}")
        else:
            self._func = profile
        self.power_bound = power_bound
        self.variant = f"radial[{self._describe_form()}, r={self.r:g}, d={self.d}]"
        self.theorem_grade = True
        self._spot_check()

    def _describe_form(self) -> str:
        if self.form:
            return f"{self.form[0]}({self.form[1]:g})"
        return "callable"

    def _spot_check(self):
        prev = None
        grid = [1.0, 1.5, 2.0, 4.0, 8.0, 32.0, 128.0, 512.0]
        if self.origin == "exact":
            grid = [0.0, 0.5] + grid
        for t in grid:
            v = self._func(t)
            if not (v > 0 and math.isfinite(v)):
                raise InputDomainError(f"radial profile must be positive/finite, got {v} at t={t}")
            if prev is not None and v > prev * (1 + 1e-12):
                raise InputDomainError("radial profile must be nonincreasing")
            prev = v

    def profile(self, t: float) -> float:
        """Profile value; under the 'clamp' convention the value below t=1
        is read at t=1 (so the origin carries the first positive value)."""
        if self.origin == "clamp":
            t = max(t, 1.0)
        return self._func(t)

    def magnitude(self, k) -> float:
        k = self.key(k)
        if len(k) != self.d:
            raise InputDomainError(f"index {k} has wrong dimension for d={self.d}")
        return self.profile(lattice_norm(k, self.r))

    def tail_sup_outside(self, R: int) -> float:
        # outside the sup-norm box of radius R every point has |k|_r >= R+1
        return self.profile(float(R + 1))

    def stream(self) -> Iterator[tuple[float, tuple]]:
        R = 4
        emitted: set = set()
        buffer: list[tuple[float, tuple]] = []
        while True:
            pts = itertools.product(range(-R, R + 1), repeat=self.d)
            buffer = [
                (self.magnitude(k), k)
                for k in pts
                if k not in emitted
            ]
            buffer.sort(key=lambda vk: (-vk[0], vk[1]))
            cutoff = self.tail_sup_outside(R)
            for v, k in buffer:
                if v > cutoff:
                    emitted.add(k)
                    yield v, k
                else:
                    break
            if R >= self.max_box:
                raise CertificationError(
                    f"radial enumeration not certifiable within box {self.max_box}"
                )
            R = min(self.max_box, R * 2)

    def _shell_monomials(self) -> list[tuple[float, int]]:
        """(coefficient, power) pairs with sum c m^j = (2m+1)^d - (2m-1)^d,
        the number of lattice points on the sup-norm shell of radius m."""
        d = self.d
        out = []
        for j in range(1, d + 1, 2):
            out.append((2.0 * math.comb(d, j) * 2.0 ** (d - j), d - j))
        return out

    def _pow_tail_weighted(self, s: float, B: int) -> tuple[float, float]:
        """(estimate, bound) for sum over sup-norm shells m > B of
        shell_count(m) * m^{-s}."""
        est, bnd = 0.0, 0.0
        for coef, j in self._shell_monomials():
            if s - j <= 1:
                raise ConvergenceError(
                    f"radial power sum diverges: effective exponent {s - j} <= 1"
                )
            t, b = _power_tail(s - j, B)
            est += coef * t
            bnd += coef * b
        return est, bnd

    def power_sum_total(self, e: float) -> tuple[float, float]:
        B = 20000 if self.d == 1 else (96 if self.d == 2 else 24)
        B = min(B, self.max_box)
        partial = math.fsum(
            self.magnitude(k) ** e
            for k in itertools.product(range(-B, B + 1), repeat=self.d)
        )
        form = self.form
        if form is None and self.power_bound is not None:
            C, beta, t0 = self.power_bound
            if B < t0:
                raise ConvergenceError("certification box does not reach power bound range")
            # conservative: treat as a power profile scaled by C (upper bound)
            upper, b = self._pow_tail_weighted_scaled(beta * e, B, C ** e)
            return partial + upper / 2.0, upper / 2.0 + b
        if form is None:
            raise ConvergenceError(
                "no certified tail rule for a callable radial profile; "
                "supply power_bound=(C, beta, t0)"
            )
        kind, param = form[0], float(form[1])
        if kind == "pow":
            s = param * e
            # every point on the shell of sup-norm radius m has |k|_r in
            # [m, d^{1/r} m]; for r = inf or d = 1 the value is exact
            upper_est, upper_bnd = self._pow_tail_weighted(s, B)
            if self.r == math.inf or self.d == 1:
                return partial + upper_est, upper_bnd
            c = float(self.d) ** (1.0 / self.r)
            lower_est = upper_est * c ** (-s)
            mid = 0.5 * (upper_est + lower_est)
            half = 0.5 * (upper_est - lower_est)
            return partial + mid, half + upper_bnd
        # geometric profile: extend the shell sum until increments vanish
        x = param ** e

        def shell_tail(base: float) -> tuple[float, float]:
            acc = 0.0
            m = B + 1
            while True:
                shell = (2 * m + 1) ** self.d - (2 * m - 1) ** self.d
                term = shell * base ** m
                acc += term
                if term < 1e-18 * max(acc, 1e-300) or m > B + 100_000:
                    rest = term * 2.0 / max(1e-12, 1.0 - base * ((m + 2) / (m + 1)) ** (self.d - 1))
                    return acc, rest
                m += 1

        upper, ub = shell_tail(x)
        if self.r == math.inf or self.d == 1:
            return partial + upper, ub
        lower, lb = shell_tail(x ** (float(self.d) ** (1.0 / self.r)))
        mid = 0.5 * (upper + lower)
        return partial + mid, 0.5 * (upper - lower) + ub + lb

    def _pow_tail_weighted_scaled(self, s: float, B: int, scale: float) -> tuple[float, float]:
        est, bnd = self._pow_tail_weighted(s, B)
        return est * scale, bnd * scale


class ExplicitTablePsi(PsiSystem):
    """Finite positive table on lattice indices, zero beyond (test-only: the
    zero tail violates the everywhere-nonzero hypothesis, so theorem-level
    operations flag this variant)."""

    def __init__(self, entries: dict, d: int | None = None):
        norm: dict[tuple, float] = {}
        for k, v in entries.items():
            key = (int(k),) if isinstance(k, (int, np.integer)) else tuple(int(x) for x in k)
            if d is None:
                d = len(key)
            if len(key) != d:
                raise InputDomainError("inconsistent index dimensions in table")
            v = float(v)
            if not v > 0:
                raise InputDomainError("table magnitudes must be positive")
            norm[key] = v
        if not norm:
            raise InputDomainError("table must be nonempty")
        self.entries = norm
        self.d = int(d)
        self.variant = f"explicit-table[{len(norm)} entries]"
        self.theorem_grade = False
        self.max_box = default_max_box(self.d)

    def magnitude(self, k) -> float:
        k = self.key(k)
        return self.entries.get(k, 0.0)

    def stream(self) -> Iterator[tuple[float, tuple]]:
        for k, v in sorted(self.entries.items(), key=lambda kv: (-kv[1], kv[0])):
            yield v, k

    def power_sum_total(self, e: float) -> tuple[float, float]:
        return math.fsum(v ** e for v in self.entries.values()), 0.0

    def nu(self, n: int) -> float:
        if self.d != 1:
            raise InputDomainError("nu(n) requires a one-dimensional system")
        return max(
            (v for k, v in self.entries.items() if abs(k[0]) >= n), default=0.0
        )

    def support(self) -> frozenset:
        return frozenset(self.entries)


class ExplicitSeqPsi(PsiSystem):
    """One-dimensional system given directly by its decreasing rearrangement:
    position j (canonical order 0, -1, 1, -2, 2, ... of the lattice) carries
    the j-th value of the sequence."""

    def __init__(self, head: Sequence[float], continuation: tuple):
        self.head = tuple(float(v) for v in head)
        self.continuation = continuation
        kind = continuation[0]
        if kind == "pow":
            s, scale = float(continuation[1]), float(continuation[2])
            if s <= 0 or scale <= 0:
                raise InputDomainError("power sequence needs s > 0, scale > 0")
            self._cont = lambda j: scale * float(j) ** (-s)
            self.theorem_grade = True
        elif kind == "geom":
            ratio = float(continuation[1])
            if not 0 < ratio < 1:
                raise InputDomainError("geometric ratio must be in (0,1)")
            first = float(continuation[2])
            k0 = len(self.head)
            last = self.head[-1] if self.head else first / ratio
            self._cont = lambda j: last * ratio ** (j - k0)
            self.theorem_grade = True
        elif kind == "zero":
            self._cont = lambda j: 0.0
            self.theorem_grade = False
            if not self.head:
                raise InputDomainError("zero-tail sequence needs a nonempty head")
        else:
            raise InputDomainError(f"unknown sequence continuation {kind!r}")
        # validate nonincreasing positive merged sequence on a prefix
        prev = math.inf
        for j in range(1, max(len(self.head) + 8, 32)):
            v = self.seq(j)
            if v < 0 or v > prev * (1 + 1e-12):
                raise InputDomainError("sequence form must be nonincreasing and nonnegative")
            prev = v
        self.d = 1
        self.variant = f"explicit-seq[{kind}]"
        self.max_box = default_max_box(1)

    @classmethod
    def power(cls, s: float, scale: float = 1.0) -> "ExplicitSeqPsi":
        return cls((), ("pow", s, scale))

    @classmethod
    def harmonic(cls) -> "ExplicitSeqPsi":
        return cls.power(1.0)

    @classmethod
    def geometric(cls, ratio: float, first: float = 1.0) -> "ExplicitSeqPsi":
        return cls((), ("geom", ratio, first))

    @classmethod
    def table(cls, values: Sequence[float], tail: tuple = ("zero",)) -> "ExplicitSeqPsi":
        return cls(tuple(values), tail)

    def seq(self, j: int) -> float:
        if j <= len(self.head):
            return self.head[j - 1]
        return self._cont(j)

    def magnitude(self, k) -> float:
        k = self.key(k)
        if len(k) != 1:
            raise InputDomainError("sequence systems are one-dimensional")
        return self.seq(_seq_position(k[0]))

    def stream(self) -> Iterator[tuple[float, tuple]]:
        order = _axis_canonical_order()
        for j in itertools.count(1):
            k = next(order)
            v = self.seq(j)
            if v == 0.0:
                return
            yield v, (k,)

    def power_sum_total(self, e: float) -> tuple[float, float]:
        kind = self.continuation[0]
        K = len(self.head)
        head_sum = math.fsum(v ** e for v in self.head)
        if kind == "zero":
            return head_sum, 0.0
        if kind == "pow":
            s = float(self.continuation[1]) * e
            scale = float(self.continuation[2]) ** e
            if s <= 1:
                raise ConvergenceError(f"sequence power sum diverges: s*e = {s} <= 1")
            P = 4096
            partial = math.fsum(self.seq(j) ** e for j in range(K + 1, K + P + 1))
            tail, bound = _power_tail(s, K + P)
            return head_sum + partial + scale * tail, scale * bound
        # geometric continuation
        x = float(self.continuation[1]) ** e
        first_tail = self.seq(K + 1) ** e
        return head_sum + first_tail / (1.0 - x), 0.0


class PhasedPsi(PsiSystem):
    """A psi-system with a unit complex phase attached to each index; all
    magnitude-driven quantities ignore the phase, only the integral /
    derivative transforms see it."""

    def __init__(self, base: PsiSystem, phase_fn: Callable):
        self.base = base
        self.phase_fn = phase_fn
        self.d = base.d
        self.variant = base.variant + "+phase"
        self.theorem_grade = base.theorem_grade
        self.max_box = base.max_box

    def magnitude(self, k) -> float:
        return self.base.magnitude(k)

    def phase(self, k) -> complex:
        ph = complex(self.phase_fn(self.key(k)))
        mod = abs(ph)
        if not math.isfinite(mod) or abs(mod - 1.0) > 1e-9:
            raise InputDomainError("phase values must lie on the unit circle")
        return ph

    def stream(self):
        return self.base.stream()

    def power_sum_total(self, e: float):
        return self.base.power_sum_total(e)

    def nu(self, n: int) -> float:
        return self.base.nu(n)

    def tail_sup_outside(self, R: int) -> float:
        return self.base.tail_sup_outside(R)


# ---------------------------------------------------------------------------
# characteristic sequences


@dataclass(frozen=True)
class CharSeq:
    """Distinct magnitudes in decreasing order with their level sets."""

    eps: tuple[float, ...]
    delta: tuple[int, ...]
    shells: tuple[tuple[tuple, ...], ...]  # shell n = g_n \ g_{n-1}
    complete_levels: int  # how many leading levels are certified complete

    def __post_init__(self):
        if any(a <= b for a, b in zip(self.eps, self.eps[1:])):
            raise InputDomainError("eps must be strictly decreasing")
        if any(a >= b for a, b in zip(self.delta, self.delta[1:])):
            raise InputDomainError("delta must be strictly increasing")

    @property
    def n_levels(self) -> int:
        return len(self.eps)

    def g(self, n: int) -> frozenset:
        """Level set g_n (empty for n = 0)."""
        if n < 0 or n > len(self.shells):
            raise InputDomainError(f"level {n} outside materialized range")
        out: set = set()
        for shell in self.shells[:n]:
            out.update(shell)
        return frozenset(out)

    def level_of_value(self, value: float) -> int:
        """1-based level index of an exact magnitude value."""
        try:
            return self._index()[value]
        except KeyError:
            raise InputDomainError(f"magnitude {value!r} is not a materialized level") from None

    def _index(self) -> dict:
        idx = getattr(self, "_idx_cache", None)
        if idx is None:
            idx = {v: i + 1 for i, v in enumerate(self.eps)}
            object.__setattr__(self, "_idx_cache", idx)
        return idx


def build_charseq(
    psi: PsiSystem,
    levels: int | None = None,
    min_total: int | None = None,
    down_to_value: float | None = None,
) -> CharSeq:
    """Materialize characteristic data from the certified enumeration.

    Stop once ``levels`` distinct magnitudes (or ``min_total`` indices, or
    all values >= ``down_to_value``) have been produced *and* the following
    value is strictly smaller, which certifies the last level's multiplicity.
    """
    if levels is None and min_total is None and down_to_value is None:
        raise InputDomainError("specify levels, min_total or down_to_value")
    if levels is not None and levels < 1:
        raise InputDomainError("levels must be >= 1")
    eps: list[float] = []
    delta: list[int] = []
    shells: list[list[tuple]] = []
    total = 0

    def targets_met() -> bool:
        if levels is not None and len(eps) < levels:
            return False
        if min_total is not None and total < min_total:
            return False
        if down_to_value is not None and (not eps or eps[-1] > down_to_value):
            return False
        return True

    exhausted = False
    for v, k in psi.stream():
        if eps and v == eps[-1]:
            shells[-1].append(k)
            total += 1
            continue
        if targets_met():
            break
        eps.append(v)
        shells.append([k])
        delta.append(0)
        total += 1
    else:
        exhausted = True
    if not targets_met() and exhausted and levels is not None and len(eps) < levels:
        raise CertificationError(
            f"system has only {len(eps)} levels, {levels} requested"
        )
    run = 0
    for i, shell in enumerate(shells):
        run += len(shell)
        delta[i] = run
    return CharSeq(
        eps=tuple(eps),
        delta=tuple(delta),
        shells=tuple(tuple(s) for s in shells),
        complete_levels=len(eps),
    )


def rearrangement(psi: PsiSystem, K: int) -> np.ndarray:
    """First K values of the decreasing rearrangement (with multiplicity)."""
    if K < 1:
        raise InputDomainError("K must be >= 1")
    vals = np.fromiter(
        (v for v, _ in itertools.islice(psi.stream(), K)), dtype=np.float64, count=-1
    )
    if vals.shape[0] < K and not isinstance(psi, (ExplicitTablePsi,)) and not (
        isinstance(psi, ExplicitSeqPsi) and psi.continuation[0] == "zero"
    ):
        raise CertificationError("enumeration ended prematurely")
    return vals


def rearrangement_padded(psi: PsiSystem, K: int) -> np.ndarray:
    """Like :func:`rearrangement` but zero-padded for exhausted finite systems."""
    vals = list(v for v, _ in itertools.islice(psi.stream(), K))
    while len(vals) < K:
        vals.append(0.0)
    return np.array(vals, dtype=np.float64)


# ---------------------------------------------------------------------------
# psi-integral / psi-derivative


def psi_integral(f: Spectrum, psi: PsiSystem) -> Spectrum:
    """Multiply each coefficient by psi(k) (phase times magnitude)."""
    if f.kind != "lattice" or f.d != psi.d:
        raise InputDomainError("psi transforms need a lattice spectrum of matching dimension")
    return Spectrum.lattice({k: c * psi.value(k) for k, c in f.items()}, f.d)


def psi_derivative(f: Spectrum, psi: PsiSystem) -> Spectrum:
    """Divide each coefficient by psi(k); requires psi nonzero on the support."""
    if f.kind != "lattice" or f.d != psi.d:
        raise InputDomainError("psi transforms need a lattice spectrum of matching dimension")
    out = {}
    for k, c in f.items():
        v = psi.value(k)
        if v == 0:
            raise InputDomainError(f"psi vanishes at {k}; derivative undefined there")
        out[k] = c / v
    return Spectrum.lattice(out, f.d)


# ---------------------------------------------------------------------------
# tail sums of the rearrangement


def tail_sum(
    psi: PsiSystem,
    exponent: float,
    start: int = 1,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """(value, bound) with value ~ sum_{j >= start} of rearrangement^exponent.

    The total over the lattice comes from the variant's certified closed-form
    machinery; the finite prefix is subtracted exactly.  Raises
    ``ConvergenceError`` when the series diverges or the rigorous bound cannot
    be brought below ``tol``.
    """
    if exponent <= 0:
        raise ConvergenceError("terms do not decay: exponent must be positive")
    if start < 1:
        raise InputDomainError("start index must be >= 1")
    total, bound = psi.power_sum_total(exponent)
    if start > 1:
        prefix = math.fsum(v ** exponent for v in rearrangement_padded(psi, start - 1))
    else:
        prefix = 0.0
    value = total - prefix
    noise = 1e-15 * (abs(total) + prefix)
    bound = bound + noise
    if bound > tol:
        raise ConvergenceError(
            f"tail bound {bound:.3e} above requested tolerance {tol:.3e}"
        )
    return max(value, 0.0), bound
