"""Generalized and averaged moduli of smoothness in coefficient-space metrics.

The generalized modulus of a finite spectrum f is

    omega_phi(f, delta)_p = sup_{|h| <= delta} ( sum_k phi(lam_k h)^p |A_k|^p )^{1/p}

for an even bounded generator phi with phi(0) = 0.  Builtin generators:

* ``phi_alpha(a)``   -- 2^a |sin(t/2)|^a, the order-a modulus generator;
* ``phi_theta(...)`` -- |sum_j theta_j e^{-ijt}|, matching a generalized
  difference operator with weights theta;
* ``phi_steklov(m)`` -- (1 - sinc t)^m, matching the m-fold defect of the
  centered sliding mean.

The averaged modulus integrates omega_phi^p against a nondecreasing weight
(Riemann-Stieltjes), normalized by the weight's total mass; it never exceeds
omega_phi at the right endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import (
    BudgetError,
    DegenerateWeightError,
    InputDomainError,
    ParseError,
)
from .spectrum import DifferenceScheme, Spectrum

_SINC_MIN_ARG = 4.493409457909064  # first positive root of tan t = t
_SINC_MIN = math.cos(_SINC_MIN_ARG)


# ---------------------------------------------------------------------------
# phi generators


class PhiFunction:
    """Even nonnegative bounded generator with phi(0) = 0.

    ``monotone_to`` is the right end of a declared interval [0, a] on which
    phi is nondecreasing with phi(a) = sup; it is required by the sharpness
    and inverse-theorem operations.
    """

    def __init__(
        self,
        kind: str,
        evaluator: Callable[[np.ndarray], np.ndarray],
        *,
        param: float = 0.0,
        theta: tuple = (),
        sup: float | None = None,
        monotone_to: float | None = None,
        label: str = "",
    ):
        self.kind = kind
        self._eval = evaluator
        self.param = float(param)
        self.theta = tuple(complex(t) for t in theta)
        self.sup = sup
        self.monotone_to = monotone_to
        self.label = label or kind
        self.is_even = True
        self._validate()

    def _validate(self):
        z = float(self(0.0))
        if abs(z) > 1e-12:
            raise InputDomainError(f"phi(0) must be 0, got {z}")
        grid = np.linspace(1e-3, 7.0, 97)
        vals = self(grid)
        if np.any(~np.isfinite(vals)) or np.any(vals < -1e-12):
            raise InputDomainError("phi must be finite and nonnegative")
        even_gap = float(np.max(np.abs(self(-grid) - vals)))
        self.is_even = even_gap <= 1e-10 * max(1.0, float(np.max(np.abs(vals))))
        # the zero set should be negligible: spot check interior points
        self.zero_set_suspicious = bool(np.mean(vals < 1e-14) > 0.2)

    def __call__(self, t):
        scalar = np.isscalar(t)
        out = self._eval(np.asarray(t, dtype=np.float64))
        return float(out) if scalar else out

    def pow_p(self, t, p: float):
        return np.asarray(self(t), dtype=np.float64) ** p

    def kernel_args(self):
        """(kind_code, param, theta_re, theta_im) for the jit kernel, or None."""
        if self.kind == "alpha":
            return (_kernels.PHI_ALPHA, self.param, np.zeros(1), np.zeros(1))
        if self.kind == "theta":
            th = np.array(self.theta, dtype=np.complex128)
            return (_kernels.PHI_THETA, 0.0, th.real.copy(), th.imag.copy())
        if self.kind == "steklov":
            return (_kernels.PHI_STEKLOV, self.param, np.zeros(1), np.zeros(1))
        return None

    def require_monotone(self, tau: float):
        if self.monotone_to is None or tau > self.monotone_to * (1 + 1e-12):
            raise InputDomainError(
                f"phi={self.label} is not declared nondecreasing up to tau={tau:g}"
            )

    def pow_p_smooth(self, p: float) -> bool:
        """Whether phi(t)**p is free of algebraic cusps (steers quadrature
        grading).  True when the power collapses to an integer power of a
        smooth function: alpha*p even for the sine family, p even for
        difference symbols, m*p integer for the sliding-mean family."""
        def near_int(x: float, even: bool = False) -> bool:
            r = round(x)
            return abs(x - r) < 1e-12 and (not even or r % 2 == 0)

        if self.kind == "alpha":
            return near_int(self.param * p, even=True)
        if self.kind == "theta":
            return near_int(p, even=True)
        if self.kind == "steklov":
            return near_int(self.param * p)
        return False

    def __repr__(self):
        return f"PhiFunction({self.label})"


def phi_alpha(alpha: float) -> PhiFunction:
    """2^alpha |sin(t/2)|^alpha; nondecreasing on [0, pi] with sup 2^alpha."""
    if not alpha > 0:
        raise InputDomainError("alpha must be positive")

    def ev(t):
        return (2.0 ** alpha) * np.abs(np.sin(0.5 * t)) ** alpha

    return PhiFunction(
        "alpha", ev, param=alpha, sup=2.0 ** alpha, monotone_to=math.pi,
        label=f"alpha:{alpha:g}",
    )


def phi_theta(theta: Sequence[complex] | DifferenceScheme) -> PhiFunction:
    """|sum_j theta_j e^{-ijt}| for a difference scheme (weights sum to 0)."""
    scheme = theta if isinstance(theta, DifferenceScheme) else DifferenceScheme(tuple(theta))
    th = np.array(scheme.theta, dtype=np.complex128)

    def ev(t):
        t = np.asarray(t, dtype=np.float64)
        j = np.arange(th.shape[0], dtype=np.float64)
        return np.abs(np.exp(-1j * np.multiply.outer(t, j)) @ th)

    # classical alternating-binomial weights give 2^m |sin(t/2)|^m
    m = len(scheme.theta) - 1
    classical = all(
        scheme.theta[j] == (-1) ** j * math.comb(m, j) for j in range(m + 1)
    )
    grid = np.linspace(0.0, 2.0 * math.pi, 4097)
    sup = float(np.max(ev(grid)))
    return PhiFunction(
        "theta", ev, theta=scheme.theta, sup=sup,
        monotone_to=math.pi if classical else None,
        label=f"theta:{[complex(x) for x in scheme.theta]}",
    )


def phi_steklov(m: int) -> PhiFunction:
    """(1 - sinc t)^m; nondecreasing up to the sinc minimum at t ~ 4.4934."""
    if m < 1:
        raise InputDomainError("Steklov order must be >= 1")

    def ev(t):
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(invalid="ignore", divide="ignore"):
            sinc = np.where(t == 0.0, 1.0, np.sin(t) / np.where(t == 0.0, 1.0, t))
        return np.clip(1.0 - sinc, 0.0, None) ** m

    return PhiFunction(
        "steklov", ev, param=float(m), sup=(1.0 - _SINC_MIN) ** m,
        monotone_to=_SINC_MIN_ARG, label=f"steklov:{m}",
    )


def phi_custom(
    fn: Callable,
    sup: float | None = None,
    monotone_to: float | None = None,
    label: str = "custom",
) -> PhiFunction:
    def ev(t):
        return np.asarray(fn(np.asarray(t, dtype=np.float64)), dtype=np.float64)

    return PhiFunction("custom", ev, sup=sup, monotone_to=monotone_to, label=label)


# ---------------------------------------------------------------------------
# weights


class WeightMeasure:
    """Bounded nondecreasing non-constant weight on [0, tau]."""

    def __init__(self, tau: float, kind: str, label: str = "", **data):
        if not tau > 0:
            raise InputDomainError("tau must be positive")
        self.tau = float(tau)
        self.kind = kind
        self.label = label or kind
        self._data = data
        if kind == "density":
            self.vprime = data["vprime"]  # vectorized, nonnegative
            self.v = data.get("v")
            dens = np.asarray(self.vprime(np.linspace(0, tau, 257)), dtype=np.float64)
            if np.any(dens < -1e-12):
                raise InputDomainError("weight density must be nonnegative")
        elif kind == "pwl":
            ts = np.asarray(data["knots_t"], dtype=np.float64)
            vs = np.asarray(data["knots_v"], dtype=np.float64)
            if ts.ndim != 1 or ts.shape != vs.shape or ts.shape[0] < 2:
                raise InputDomainError("piecewise-linear weight needs matching knot arrays")
            if ts[0] > 0 or ts[-1] < tau:
                raise InputDomainError("knots must cover [0, tau]")
            if np.any(np.diff(ts) <= 0) or np.any(np.diff(vs) < 0):
                raise InputDomainError("weight knots must be increasing in t, nondecreasing in v")
            self.knots_t, self.knots_v = ts, vs
        elif kind == "atomic":
            pts = np.asarray(data["points"], dtype=np.float64)
            jmp = np.asarray(data["jumps"], dtype=np.float64)
            if pts.shape != jmp.shape or np.any(jmp < 0):
                raise InputDomainError("atomic weight needs matching nonnegative jumps")
            if np.any(pts < 0) or np.any(pts > tau):
                raise InputDomainError("atoms must lie in [0, tau]")
            order = np.argsort(pts)
            self.points, self.jumps = pts[order], jmp[order]
        else:
            raise InputDomainError(f"unknown weight kind {kind!r}")
        if self.total_mass() <= 0:
            raise DegenerateWeightError("weight must be non-constant on [0, tau]")

    def total_mass(self) -> float:
        """v(tau) - v(0) (atoms at 0 excluded: the measure lives on (0, tau])."""
        return self.mass(0.0, self.tau)

    def mass(self, a: float, b: float) -> float:
        if self.kind == "density":
            if self.v is not None:
                return float(self.v(b)) - float(self.v(a))
            val, _ = _gauss_adaptive(lambda t: np.ones_like(t) * self.vprime(t), a, b, 1e-13, 4)
            return val
        if self.kind == "pwl":
            return float(self._pwl_value(b) - self._pwl_value(a))
        sel = (self.points > a) & (self.points <= b)
        return float(np.sum(self.jumps[sel]))

    def _pwl_value(self, t: float) -> float:
        return float(np.interp(t, self.knots_t, self.knots_v))

    def __repr__(self):
        return f"WeightMeasure({self.label}, tau={self.tau:g})"


def weight_cos(tau: float = math.pi) -> WeightMeasure:
    """v(t) = 1 - cos t (density sin t)."""
    return WeightMeasure(
        tau, "density", vprime=lambda t: np.sin(np.asarray(t, dtype=np.float64)),
        v=lambda t: 1.0 - np.cos(np.asarray(t, dtype=np.float64)), label="cos",
    )


def weight_linear(tau: float) -> WeightMeasure:
    """v(t) = t (unit density)."""
    return WeightMeasure(
        tau, "density", vprime=lambda t: np.ones_like(np.asarray(t, dtype=np.float64)),
        v=lambda t: np.asarray(t, dtype=np.float64), label="t",
    )


def weight_pwl(knots_t, knots_v) -> WeightMeasure:
    return WeightMeasure(float(np.max(knots_t)), "pwl", knots_t=knots_t, knots_v=knots_v, label="pwl")


def weight_atomic(points, jumps, tau: float | None = None) -> WeightMeasure:
    tau = float(np.max(points)) if tau is None else float(tau)
    return WeightMeasure(tau, "atomic", points=points, jumps=jumps, label="atomic")


# ---------------------------------------------------------------------------
# quadrature (main route: adaptive composite Gauss-Legendre)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _gauss_panels(g: Callable, a: float, b: float, panels: int) -> float:
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = np.asarray(g(t.ravel()), dtype=np.float64).reshape(t.shape)
    return float(np.sum((vals @ _GL_WEIGHTS) * half))


def _adaptive_block(
    g: Callable, a: float, b: float, tol: float, panels0: int, budget: int
) -> tuple[float, float]:
    panels = max(2, panels0)
    prev = _gauss_panels(g, a, b, panels)
    while True:
        panels *= 2
        if panels > budget:
            raise BudgetError(
                f"quadrature budget exceeded ({panels} panels for tolerance {tol:g})"
            )
        cur = _gauss_panels(g, a, b, panels)
        err = abs(cur - prev)
        if err <= tol:
            return cur, err
        prev = cur


def _adaptive_whole(
    g: Callable, a: float, b: float, tol: float, panels0: int, budget: int = 2 ** 16
) -> tuple[float, float]:
    """Whole-interval panel doubling (for integrands smooth on [a, b])."""
    if b <= a:
        return 0.0, 0.0
    return _adaptive_block(g, a, b, tol, panels0, budget)


def _gauss_adaptive(
    g: Callable, a: float, b: float, tol: float, panels0: int, budget: int = 2 ** 13
) -> tuple[float, float]:
    """Adaptive composite Gauss-Legendre with dyadic grading toward the left
    endpoint (integrands routinely carry an algebraic cusp at 0); each block
    is refined by panel doubling until its tolerance share is met."""
    if b <= a:
        return 0.0, 0.0
    span = b - a
    levels = 40
    edges = [a] + [a + span * 2.0 ** (-j) for j in range(levels, -1, -1)]
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        frac = (hi - lo) / span
        block_tol = tol * max(frac, 1.0 / 256.0)
        p0 = max(2, int(math.ceil(panels0 * frac)))
        v, e = _adaptive_block(g, lo, hi, block_tol, p0, budget)
        total += v
        err += e
    return total, err


def stieltjes(
    g: Callable,
    v: WeightMeasure,
    interval: tuple[float, float] | None = None,
    tol: float = 1e-10,
    osc: float = 1.0,
    graded: bool = True,
) -> tuple[float, float]:
    """Riemann-Stieltjes integral of g against dv over ``interval``.

    Returns (value, absolute error estimate).  ``osc`` is an oscillation-count
    hint used to seed the panel count for the adaptive rule; ``graded``
    selects grading of the panels toward the left endpoint (needed for
    integrands with an algebraic cusp there, skippable for smooth ones).
    Densities integrate g * v'; piecewise-linear weights integrate per
    segment with the slope as a constant factor; atomic weights reduce to a
    weighted sum over atoms in (a, b].
    """
    a, b = interval if interval is not None else (0.0, v.tau)
    if b < a:
        raise InputDomainError("empty integration interval")
    adapt = _gauss_adaptive if graded else _adaptive_whole
    if v.kind == "density":
        panels0 = max(4, int(math.ceil(2.0 * osc)))
        return adapt(
            lambda t: np.asarray(g(t), dtype=np.float64) * np.asarray(v.vprime(t), dtype=np.float64),
            a, b, tol, panels0,
        )
    if v.kind == "pwl":
        total, err = 0.0, 0.0
        ts, vs = v.knots_t, v.knots_v
        for i in range(ts.shape[0] - 1):
            lo, hi = max(a, float(ts[i])), min(b, float(ts[i + 1]))
            if hi <= lo:
                continue
            slope = (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i])
            if slope == 0.0:
                continue
            seg, seg_err = adapt(
                lambda t: np.asarray(g(t), dtype=np.float64) * slope, lo, hi, tol, max(2, int(osc)),
            )
            total += seg
            err += seg_err
        return total, err
    # atomic
    sel = (v.points > a) & (v.points <= b)
    pts = v.points[sel]
    if pts.size == 0:
        return 0.0, 0.0
    vals = np.asarray(g(pts), dtype=np.float64)
    return float(np.sum(vals * v.jumps[sel])), 0.0


# ---------------------------------------------------------------------------
# moduli


def _objective_grid(f: Spectrum, phi: PhiFunction, p: float, hs: np.ndarray) -> np.ndarray:
    """sum_k phi(lam_k h)^p |A_k|^p over the shift grid."""
    lams = f.scalar_frequencies()
    amps_p = f.abs_coefficients() ** p
    ka = phi.kernel_args()
    if ka is not None:
        kind, param, tre, tim = ka
        return _kernels.modulus_objective(lams, amps_p, hs, kind, param, tre, tim, p)
    out = np.empty(hs.shape[0], dtype=np.float64)
    chunk = max(8, 65536 // max(1, lams.shape[0]))
    for start in range(0, hs.shape[0], chunk):
        blk = hs[start:start + chunk]
        w = phi.pow_p(np.multiply.outer(blk, lams), p)
        out[start:start + blk.shape[0]] = w @ amps_p
    return out


def _objective_at(f: Spectrum, phi: PhiFunction, p: float, h: float) -> float:
    lams = f.scalar_frequencies()
    amps_p = f.abs_coefficients() ** p
    return float(phi.pow_p(lams * h, p) @ amps_p)


def _golden_max(fn: Callable[[float], float], a: float, b: float, iters: int = 80) -> float:
    return _golden_max_arg(fn, a, b, iters)[1]


def _golden_max_arg(
    fn: Callable[[float], float], a: float, b: float, iters: int = 80
) -> tuple[float, float]:
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - gr * (b - a)
    x2 = a + gr * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if b - a < 1e-15 * max(1.0, abs(b)):
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + gr * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - gr * (b - a)
            f1 = fn(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def omega_phi(
    f: Spectrum,
    phi: PhiFunction,
    delta: float,
    p: float = 1.0,
    n_grid: int = 2048,
    refine_brackets: int = 8,
) -> float:
    """Generalized modulus of smoothness at step delta.

    The sup over shifts is taken on a uniform grid (endpoint included, at
    least 8 points per oscillation of the fastest frequency) followed by
    golden-section refinement of the best local maxima.  Evenness of phi
    halves the scan range; non-even generators are scanned symmetrically.
    """
    if delta < 0:
        raise InputDomainError("delta must be >= 0")
    if not p > 0:
        raise InputDomainError("p must be positive")
    if len(f) == 0 or delta == 0.0:
        return 0.0
    lam_max = float(np.max(np.abs(f.scalar_frequencies())))
    if lam_max == 0.0:
        return 0.0
    oscillations = lam_max * delta / (2.0 * math.pi)
    n = max(n_grid, int(math.ceil(16 * oscillations)))
    if phi.is_even:
        hs = np.linspace(0.0, delta, n + 1)
    else:
        hs = np.linspace(-delta, delta, 2 * n + 1)
    obj = _objective_grid(f, phi, p, hs)
    # candidate brackets: the sampled local maxima (plus both endpoints),
    # strongest first; golden-section each. The grid endpoint value itself
    # is already exact.
    interior = np.where(
        (obj[1:-1] >= obj[:-2]) & (obj[1:-1] >= obj[2:])
    )[0] + 1
    order = interior[np.argsort(obj[interior])][::-1][:refine_brackets]
    candidates = set(int(i) for i in order)
    candidates.add(0)
    candidates.add(obj.shape[0] - 1)
    result = float(np.max(obj))

    def fn(h: float) -> float:
        return _objective_at(f, phi, p, h)

    for i in candidates:
        lo = float(hs[max(0, i - 1)])
        hi = float(hs[min(hs.shape[0] - 1, i + 1)])
        result = max(result, _golden_max(fn, lo, hi))
    return result ** (1.0 / p)


class OmegaEvaluator:
    """Reusable evaluator of delta -> omega_phi(f, phi, delta, p)^p.

    The objective grid over [0, delta_max] is computed once, every interior
    sampled local maximum is refined by golden section up front, and a query
    then combines the running grid maximum, the refined peaks at or below
    delta, and the exact objective value at delta itself.  Queries cost O(1)
    spectrum evaluations, which makes weighted integrals of the modulus
    cheap."""

    def __init__(self, f: Spectrum, phi: PhiFunction, p: float, delta_max: float, n_grid: int = 2048):
        if not p > 0:
            raise InputDomainError("p must be positive")
        self.f, self.phi, self.p = f, phi, p
        self.delta_max = float(delta_max)
        self.trivial = len(f) == 0 or delta_max <= 0
        if self.trivial:
            return
        lam_max = float(np.max(np.abs(f.scalar_frequencies())))
        if lam_max == 0.0:
            self.trivial = True
            return
        if not phi.is_even:
            raise InputDomainError("the shared evaluator supports even generators only")
        n = max(n_grid, int(math.ceil(16 * lam_max * delta_max / (2 * math.pi))))
        self.hs = np.linspace(0.0, self.delta_max, n + 1)
        self.obj = _objective_grid(f, phi, p, self.hs)
        self.runmax = np.maximum.accumulate(self.obj)
        interior = np.where(
            (self.obj[1:-1] >= self.obj[:-2]) & (self.obj[1:-1] >= self.obj[2:])
        )[0] + 1
        fn = lambda h: _objective_at(f, phi, p, h)
        peaks = []
        for i in interior:
            lo, hi = float(self.hs[i - 1]), float(self.hs[i + 1])
            h_star, val = _golden_max_arg(fn, lo, hi)
            peaks.append((h_star, val))
        peaks.sort()
        self.peak_h = np.array([h for h, _ in peaks])
        self.peak_v = np.array([v for _, v in peaks])
        if self.peak_v.size:
            self.peak_runmax = np.maximum.accumulate(self.peak_v)

    def power_values(self, deltas: np.ndarray) -> np.ndarray:
        """omega^p at each step (vectorized; steps within [0, delta_max])."""
        deltas = np.asarray(deltas, dtype=np.float64)
        if self.trivial:
            return np.zeros_like(deltas)
        if float(np.max(deltas, initial=0.0)) > self.delta_max * (1 + 1e-12):
            raise InputDomainError("query beyond the evaluator range")
        best = _objective_grid(self.f, self.phi, self.p, np.clip(deltas, 0.0, None))
        idx = np.searchsorted(self.hs, deltas, side="right") - 1
        valid = idx >= 0
        best[valid] = np.maximum(best[valid], self.runmax[idx[valid]])
        if self.peak_h.size:
            jdx = np.searchsorted(self.peak_h, deltas, side="right") - 1
            pv = jdx >= 0
            best[pv] = np.maximum(best[pv], self.peak_runmax[jdx[pv]])
        best[deltas <= 0.0] = 0.0
        return best

    def power_value(self, delta: float) -> float:
        return float(self.power_values(np.array([delta]))[0])

    def value(self, delta: float) -> float:
        return self.power_value(delta) ** (1.0 / self.p)


def averaged_omega(
    f: Spectrum,
    phi: PhiFunction,
    tau: float,
    v: WeightMeasure,
    u: float,
    p: float = 1.0,
    tol: float = 1e-10,
) -> float:
    """Weight-averaged modulus: the normalized p-mean of omega_phi(f, .)^p
    over steps up to u, integrated against v(tau t / u).

    Never exceeds omega_phi(f, u) (the integrand is maximal at the endpoint
    and the average is normalized by the total mass).
    """
    if not u > 0:
        raise InputDomainError("u must be positive")
    if abs(v.tau - tau) > 1e-12 * max(1.0, tau):
        raise InputDomainError("weight is defined on a different [0, tau]")
    mass = v.total_mass()
    if mass <= 0:
        raise DegenerateWeightError("weight has no mass on (0, tau]")
    if len(f) == 0:
        return 0.0
    evaluator = OmegaEvaluator(f, phi, p, u)

    def integrand(s):
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        return evaluator.power_values(u * s / tau)

    lam_max = float(np.max(np.abs(f.scalar_frequencies())))
    osc = max(1.0, lam_max * u / (2 * math.pi))
    val, _ = stieltjes(integrand, v, (0.0, tau), tol=tol, osc=osc)
    return (max(val, 0.0) / mass) ** (1.0 / p)
