"""Three-mode network layer: distill two-mode channels and sweep teleportation fidelities.

A channel between the pair (i, j) is distilled either by tracing out the
remaining mode k or by heterodyning it and communicating the outcome.  Both
yield standard-form channels; heterodyning reduces the variances by
(T_i -/+ T_j)^2/(Q_k + 1/2) and adds a known drift proportional to the
outcome.  Alice defaults to the lower remaining mode index; ``swap_roles``
reverses the assignment (used when teleporting onto the mirror, where the
Stokes mode is the sender).
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .dynamics import (
    TWO_PI,
    CouplingParams,
    _cs_pair,
    closed_coefficients,
    evolve,
    pair_het_variance_sum,
    pair_modes,
    pair_variance_sum,
    pair_x_determinant,
)
from .gaussian import heterodyne_condition, partial_trace
from .teleportation import Channel, StandardForm

__all__ = [
    "DistillMethod",
    "DistillConfig",
    "FidelityCurve",
    "Milestones",
    "TelecloningInterval",
    "TelecloneFidelities",
    "distill",
    "distill_trace",
    "distill_heterodyne",
    "fidelity_curve",
    "default_grid",
    "milestones",
    "locate_peak",
    "telecloning_interval",
    "teleclone",
    "trace_pair_min_pt_symplectic",
    "trace_pair_separable",
]


class DistillMethod(enum.Enum):
    TRACE = "trace"
    HETERODYNE = "het"


@dataclass(frozen=True)
class DistillConfig:
    """One distillation setup: which mode is discarded/measured and how."""

    k: int
    method: DistillMethod
    params: CouplingParams
    alpha: complex = 0j
    swap_roles: bool = False

    def __post_init__(self) -> None:
        pair_modes(self.k)
        a = complex(self.alpha)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValueError("alpha must be finite")

    @property
    def mode_pair(self) -> tuple[int, int]:
        i, j = pair_modes(self.k)
        return (j, i) if self.swap_roles else (i, j)


@dataclass(frozen=True)
class FidelityCurve:
    """Sampled (t', F_+, F_-) series for one distillation configuration."""

    config: DistillConfig
    grid: np.ndarray
    f_plus: np.ndarray
    f_minus: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        fp = np.asarray(self.f_plus, dtype=float)
        fm = np.asarray(self.f_minus, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("grid must be a nonempty 1-d array")
        if fp.shape != grid.shape or fm.shape != grid.shape:
            raise ValueError("fidelity series must match the grid length")
        for f in (fp, fm):
            if np.any(f <= 0.0) or np.any(f > 1.0):
                raise ValueError("fidelities must lie in (0, 1]")
        for arr in (grid, fp, fm):
            arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "f_plus", fp)
        object.__setattr__(self, "f_minus", fm)


def _parity(k: int) -> int:
    # sign convention of the cross-coupling entry after discarding mode k
    return -1 if k == 1 else 1


def _variance_combos(tprime, params: CouplingParams, k: int, het: bool):
    """Stable (var_x_plus, var_x_minus, var_p_plus, var_p_minus) for the distilled channel."""
    par = _parity(k)
    combo = pair_het_variance_sum if het else pair_variance_sum
    out = []
    for s in (1, -1):  # X combos
        out.append(combo(tprime, params, k, s * par))
    for s in (1, -1):  # P combos
        out.append(combo(tprime, params, k, -s))
    return out


def distill_trace(
    tprime: float, params: CouplingParams, k: int, swap_roles: bool = False
) -> Channel:
    """Trace out mode k of the evolved state: a zero-drift standard-form channel.

    The cross couplings are ((-1)^k T_k, -T_k), so k = 0, 2 give EPR channels
    (c' = -c) and k = 1 a symmetric classical one (c' = c).
    """
    i, j = pair_modes(k)
    keep = (j, i) if swap_roles else (i, j)
    reduced = partial_trace(evolve(tprime, params), keep)
    coeff = closed_coefficients(float(tprime), params)
    qs, ts = coeff[:3], coeff[3:]
    a_val, b_val = float(qs[keep[0]]), float(qs[keep[1]])
    vxp, vxm, vpp, vpm = (float(x) for x in _variance_combos(float(tprime), params, k, het=False))
    sf = StandardForm(
        a=a_val,
        b=b_val,
        c=float(_parity(k) * ts[k]),
        c_prime=float(-ts[k]),
        var_x_plus=vxp,
        var_x_minus=vxm,
        var_p_plus=vpp,
        var_p_minus=vpm,
    )
    return Channel.from_state(reduced, alice_mode=keep[0], bob_mode=keep[1], standard_form=sf)


def distill_heterodyne(
    tprime: float,
    params: CouplingParams,
    k: int,
    alpha: complex = 0j,
    swap_roles: bool = False,
) -> Channel:
    """Heterodyne mode k with outcome ``alpha``: a drifted standard-form channel.

    The conditional covariance comes from the generic Gaussian update; the
    stored variance combinations use the cancellation-free closed forms.
    The drift depends on alpha and on the Alice/Bob ordering.
    """
    cond = heterodyne_condition(evolve(tprime, params), mode=k, alpha=alpha)
    if swap_roles:
        cond = partial_trace(cond, (1, 0))
    cm = cond.cm
    vxp, vxm, vpp, vpm = (float(x) for x in _variance_combos(float(tprime), params, k, het=True))
    sf = StandardForm(
        a=float(cm[0, 0]),
        b=float(cm[2, 2]),
        c=float(cm[0, 2]),
        c_prime=float(cm[1, 3]),
        var_x_plus=vxp,
        var_x_minus=vxm,
        var_p_plus=vpp,
        var_p_minus=vpm,
    )
    i, j = pair_modes(k)
    keep = (j, i) if swap_roles else (i, j)
    return Channel.from_state(cond, alice_mode=keep[0], bob_mode=keep[1], standard_form=sf)


def distill(config: DistillConfig, tprime: float) -> Channel:
    if config.method is DistillMethod.TRACE:
        return distill_trace(tprime, config.params, config.k, config.swap_roles)
    return distill_heterodyne(tprime, config.params, config.k, config.alpha, config.swap_roles)


def _curve_values(config: DistillConfig, tgrid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    het = config.method is DistillMethod.HETERODYNE
    vxp, vxm, vpp, vpm = _variance_combos(tgrid, config.params, config.k, het)
    f_plus = 1.0 / np.sqrt((1.0 + vxp) * (1.0 + vpm))
    f_minus = 1.0 / np.sqrt((1.0 + vxm) * (1.0 + vpp))
    # roundoff may graze 1 from above at ideal points
    return np.minimum(f_plus, 1.0), np.minimum(f_minus, 1.0)


def default_grid(n: int = 2001, half_width: float = 1.5) -> np.ndarray:
    """The figures' sampling window: ``n`` points centred on t' = 2*pi."""
    return np.linspace(TWO_PI - half_width, TWO_PI + half_width, n)


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("CVNET_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def fidelity_curve(
    config: DistillConfig, grid: np.ndarray, threads: int | None = None
) -> FidelityCurve:
    """Per-point distillation fidelities (optimal displacement applied) over ``grid``.

    Grid chunks may be evaluated concurrently (capped by ``threads`` or the
    CVNET_THREADS environment variable); results are assembled in grid order,
    so the output is deterministic and identical for any worker count.
    """
    tgrid = np.asarray(grid, dtype=float)
    if tgrid.ndim != 1 or tgrid.size == 0:
        raise ValueError("grid must be a nonempty 1-d array")
    if not np.all(np.isfinite(tgrid)):
        raise ValueError("grid must be finite")
    if tgrid.size > 1 and np.any(np.diff(tgrid) <= 0):
        raise ValueError("grid must be strictly ascending")
    n_workers = _thread_count(threads)
    if n_workers <= 1 or tgrid.size < 64:
        fp, fm = _curve_values(config, tgrid)
    else:
        chunks = np.array_split(tgrid, n_workers)
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(lambda c: _curve_values(config, c), chunks))
        fp = np.concatenate([p[0] for p in parts])
        fm = np.concatenate([p[1] for p in parts])
    return FidelityCurve(config=config, grid=tgrid, f_plus=fp, f_minus=fm)


@dataclass(frozen=True)
class Milestones:
    """Closed-form landmarks of the trace-out fidelity curves.

    f2_max: temperature-independent maximum of F_-(k=2), (1+r)^2/[1+2r(1+r)],
    reached at t_max = 2*pi + varsigma/2 with varsigma = arccos(2/r^2 - 1);
    f0_at_pi = 1/2 + r/(r^2+1) is F_-(k=0) at t' = pi; boundary_value
    (2+nbar)^(-1) is F_-(k=2) at both edges t_max -/+ varsigma/2.
    """

    f2_max: float
    t_max: float
    varsigma: float
    f0_at_pi: float
    boundary_value: float


def milestones(params: CouplingParams) -> Milestones:
    r = params.r
    _, s = _cs_pair(r)
    # varsigma = arccos(2 r^-2 - 1), evaluated as 2 asin(1/s) which stays
    # accurate when the argument of arccos grazes 1
    varsigma = 2.0 * math.asin(1.0 / float(s))
    return Milestones(
        f2_max=(1.0 + r) ** 2 / (1.0 + 2.0 * r * (1.0 + r)),
        t_max=TWO_PI + 0.5 * varsigma,
        varsigma=varsigma,
        f0_at_pi=0.5 + r / (r * r + 1.0),
        boundary_value=1.0 / (2.0 + params.nbar),
    )


def _trace_f_minus(params: CouplingParams, k: int):
    config = DistillConfig(k=k, method=DistillMethod.TRACE, params=params)

    def f(t: float) -> float:
        return float(_curve_values(config, np.asarray([t]))[1][0])

    return f


def locate_peak(
    params: CouplingParams, k: int, bracket: tuple[float, float], xatol: float = 1e-9
) -> tuple[float, float]:
    """Numerically maximize the trace-out F_- curve for pair complement k inside ``bracket``."""
    f = _trace_f_minus(params, k)
    res = minimize_scalar(
        lambda t: -f(t), bounds=bracket, method="bounded", options={"xatol": xatol}
    )
    return float(res.x), float(-res.fun)


class TelecloningInterval(NamedTuple):
    t_lo: float
    t_hi: float


class TelecloneFidelities(NamedTuple):
    f_bob0: float
    f_charlie2: float


def telecloning_interval(
    params: CouplingParams, bracket: tuple[float, float] | None = None
) -> TelecloningInterval | None:
    """Roots of F_-(k=2) = F_-(k=0) bracketing the window where both exceed 1/2.

    Returns None when the curves never cross above each other inside the
    bracket (the window closes at large nbar).  Roots are located by Brent
    bisection to better than 1e-9 in t'.
    """
    ms = milestones(params)
    if bracket is None:
        pad = max(0.05, 0.2 * ms.varsigma)
        bracket = (TWO_PI - pad, TWO_PI + ms.varsigma + pad)
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < TWO_PI < hi:
        raise ValueError("bracket must contain t' = 2*pi")
    f2 = _trace_f_minus(params, 2)
    f0 = _trace_f_minus(params, 0)

    def g(t: float) -> float:
        return f2(t) - f0(t)

    peak = ms.t_max if lo < ms.t_max < hi else 0.5 * (lo + hi)
    if g(peak) <= 0.0:
        return None
    if g(lo) >= 0.0 or g(hi) >= 0.0:
        return None
    t_lo = brentq(g, lo, peak, xtol=1e-12, rtol=8.9e-16)
    t_hi = brentq(g, peak, hi, xtol=1e-12, rtol=8.9e-16)
    return TelecloningInterval(t_lo=float(t_lo), t_hi=float(t_hi))


def teleclone(tprime: float, params: CouplingParams) -> TelecloneFidelities:
    """Clone fidelities with the Stokes mode as port: Bob gets the mirror (0), Charlie the anti-Stokes (2).

    Both receivers displace with the same communicated outcome of Alice's
    (x_-, p_+) measurement; the clone fidelities are the trace-out F_- values
    of the k=2 and k=0 channels at ``tprime``.
    """
    f_bob = _trace_f_minus(params, 2)(float(tprime))
    f_charlie = _trace_f_minus(params, 0)(float(tprime))
    return TelecloneFidelities(f_bob0=f_bob, f_charlie2=f_charlie)


def trace_pair_min_pt_symplectic(tprime: float, params: CouplingParams, k: int) -> float:
    """Smallest symplectic eigenvalue of the partially transposed traced-out pair.

    Evaluated from cancellation-free closed forms in extended precision, so
    the separability margin is meaningful even at r - 1 ~ 1e-7 where the raw
    covariance entries are ~1e13 and generic eigensolves lose the margin.
    """
    ld = np.longdouble
    coeff = closed_coefficients(float(tprime), params, dtype=ld)
    qs, ts = coeff[:3], coeff[3:]
    i, j = pair_modes(k)
    a, b = qs[i], qs[j]
    t_k = ts[k]
    g = pair_x_determinant(float(tprime), params, k, dtype=ld)
    diff2 = (a - b) ** 2
    if k == 1:
        delta_pt = diff2 + 2 * g
        disc = diff2 * (diff2 + 4 * g)
    else:
        delta_pt = diff2 + 2 * g + 4 * t_k * t_k
        disc = (diff2 + 4 * t_k * t_k) * (diff2 + 4 * t_k * t_k + 4 * g)
    nu_sq = 2 * g * g / (delta_pt + np.sqrt(disc))
    return float(np.sqrt(nu_sq))


def trace_pair_separable(tprime: float, params: CouplingParams, k: int) -> bool:
    """PPT separability of the traced-out pair, from the stable closed forms."""
    return trace_pair_min_pt_symplectic(tprime, params, k) >= 0.5 - 1e-10
