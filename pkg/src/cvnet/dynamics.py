"""Closed three-mode dynamics: mirror mode 0 coupled to Stokes (1) and anti-Stokes (2) sidebands.

In scaled time t' the Heisenberg equations of the quadratures are linear with
generator built from c = 1/sqrt(r^2-1) and s = r/sqrt(r^2-1) (s^2 - c^2 = 1):

    dX0 =  c X1 - s X2      dP0 = -c P1 - s P2
    dX1 =  c X0             dP1 = -c P0
    dX2 =  s X0             dP2 =  s P0

The generator G satisfies G^3 = -G, so the propagator has the exact
trigonometric form S(t') = I + G sin t' + G^2 (1 - cos t'), periodic in 2 pi.
Everything downstream is evaluated through symbolically pre-simplified
closed forms: near r = 1 the covariance entries grow like 1/(r-1) and the
physically relevant combinations (EPR variances, two-mode determinants)
cancel almost completely, so naive entry arithmetic loses most digits.  The
forms below are sums of non-negative terms (or benign differences) built
from (s-c)^2 = (r-1)/(r+1) and (s+c)^2 = (r+1)/(r-1), which double precision
evaluates to relative accuracy at any r > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gaussian import GaussianState, symplectic_form

__all__ = [
    "CouplingParams",
    "CmCoefficients",
    "SymplecticTransform",
    "coupling_ratio",
    "generator",
    "transfer_matrix",
    "evolve",
    "coefficients",
    "closed_coefficients",
    "pair_modes",
    "pair_variance_sum",
    "pair_het_reduction",
    "pair_het_variance_sum",
    "pair_x_determinant",
]

TWO_PI = 2.0 * np.pi
# 2*pi to long-double accuracy; np.pi is only a double
TWO_PI_LD = np.longdouble("6.28318530717958647692528676655900577")


@dataclass(frozen=True)
class CouplingParams:
    """Coupling ratio r = theta/chi > 1 and mirror thermal occupation nbar.

    Only the ratio and the scaled time enter the dynamics; the absolute
    coupling scale is absorbed into t' = t sqrt(theta^2 - chi^2), which is
    real only for r > 1.
    """

    r: float
    nbar: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r > 1.0):
            raise ValueError("r must be finite and strictly greater than 1")
        if not (math.isfinite(self.nbar) and self.nbar >= 0.0):
            raise ValueError("nbar must be finite and >= 0")


@dataclass(frozen=True)
class CmCoefficients:
    """The six independent entries of the evolved three-mode covariance matrix.

    q0, q1, q2 are the single-mode X (= P) variances; t0, t1, t2 the
    cross-mode couplings, indexed by the mode *not* involved (t0 couples
    modes 1-2, t1 couples 0-2, t2 couples 0-1).
    """

    q0: float
    q1: float
    q2: float
    t0: float
    t1: float
    t2: float

    def __post_init__(self) -> None:
        for name in ("q0", "q1", "q2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.5 - 1e-9 * max(1.0, abs(v))):
                raise ValueError(f"{name} must be >= 1/2 for a physical state, got {v}")


@dataclass(frozen=True)
class SymplecticTransform:
    """Quadrature transfer matrix S(t') with S Omega S^T = Omega."""

    matrix: np.ndarray
    tprime: float
    r: float

    def __post_init__(self) -> None:
        s = np.asarray(self.matrix, dtype=float)
        if s.shape != (6, 6):
            raise ValueError("transfer matrix must be 6x6")
        omega = symplectic_form(3)
        defect = np.max(np.abs(s @ omega @ s.T - omega))
        norm = max(1.0, float(np.max(np.abs(s))) ** 2)
        if defect > 1e-10 * norm:
            raise ValueError(f"matrix is not symplectic: scaled defect {defect / norm:.3e}")
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "matrix", s)


def coupling_ratio(omega0: float, big_omega: float) -> float:
    """r = sqrt((omega0 + Omega)/(omega0 - Omega)) from the carrier and vibrational frequencies."""
    if not (math.isfinite(omega0) and math.isfinite(big_omega)):
        raise ValueError("frequencies must be finite")
    if big_omega < 0 or omega0 <= big_omega:
        raise ValueError("need omega0 > Omega >= 0")
    return math.sqrt((omega0 + big_omega) / (omega0 - big_omega))


class _Trig(NamedTuple):
    """Reduced-phase trigonometric values, including the half angle.

    sn = sin t', v = 1 - cos t' (= 2 half_sn^2, exact near recurrences),
    cs = cos t', half_sn = sin(t'/2), half_cs = cos(t'/2).
    """

    sn: np.ndarray
    v: np.ndarray
    cs: np.ndarray
    half_sn: np.ndarray
    half_cs: np.ndarray


def _cs_pair(r: float, dtype=np.float64) -> tuple[np.ndarray, np.ndarray]:
    """(c, s) evaluated via m = r - 1, avoiding the r^2 - 1 cancellation."""
    rd = dtype(r)
    m = rd - dtype(1)
    c2 = dtype(1) / (m * (m + dtype(2)))
    c = np.sqrt(c2)
    return c, np.sqrt(c2 + dtype(1))


def _trig(tprime, dtype=np.float64) -> _Trig:
    t = np.asarray(tprime, dtype=dtype)
    if not np.all(np.isfinite(t)):
        raise ValueError("t' must be finite")
    two_pi = TWO_PI_LD if dtype == np.longdouble else dtype(TWO_PI)
    # dynamics is exactly 2*pi periodic; reduce before trig to keep phase accuracy for large t'
    t = np.remainder(t, two_pi)
    half = np.sin(t / 2)
    # 2 sin^2(t/2) keeps full relative accuracy near t = 2 m pi, where
    # 1 - cos(t) cancels and the stable variance forms need small v exactly
    return _Trig(
        sn=np.sin(t), v=2 * half * half, cs=np.cos(t), half_sn=half, half_cs=np.cos(t / 2)
    )


def generator(r: float) -> np.ndarray:
    """Drift matrix of the scaled-time quadrature equations (eigenvalues {0, 0, +/-i, +/-i})."""
    if not (math.isfinite(r) and r > 1.0):
        raise ValueError("r must be finite and strictly greater than 1")
    c, s = _cs_pair(r)
    g = np.zeros((6, 6))
    g[0, 2] = c
    g[0, 4] = -s
    g[1, 3] = -c
    g[1, 5] = -s
    g[2, 0] = c
    g[3, 1] = -c
    g[4, 0] = s
    g[5, 1] = s
    return g


def transfer_matrix(tprime: float, r: float) -> SymplecticTransform:
    """S(t') = I + G sin t' + G^2 (1 - cos t'), the exact propagator (no generic expm)."""
    g = generator(r)
    tr = _trig(float(tprime))
    s = np.eye(6) + g * float(tr.sn) + (g @ g) * float(tr.v)
    return SymplecticTransform(matrix=s, tprime=float(tprime), r=float(r))


def closed_coefficients(tprime, params: CouplingParams, dtype=np.float64):
    """Covariance coefficients (q0, q1, q2, t0, t1, t2) from the trigonometric closed form.

    Accepts scalar or array t'; returns six arrays (or scalars) of ``dtype``.
    These are the entries of S(t') V(0) S(t')^T evaluated symbolically.
    """
    c, s = _cs_pair(params.r, dtype)
    q = dtype(params.nbar) + dtype(0.5)
    kap = c * c + s * s
    tr = _trig(tprime, dtype)
    sn, v, cs = tr.sn, tr.v, tr.cs
    half = dtype(0.5)
    q0 = q * cs * cs + half * kap * sn * sn
    q1 = q * c * c * sn * sn + half * ((1 + c * c * v) ** 2 + (c * s * v) ** 2)
    q2 = q * s * s * sn * sn + half * ((c * s * v) ** 2 + (1 - s * s * v) ** 2)
    t0 = c * s * (q * sn * sn + half * kap * v * v)
    t1 = s * sn * (half * (1 - kap * v) - q * cs)
    t2 = c * sn * (q * cs + half * (1 + kap * v))
    return q0, q1, q2, t0, t1, t2


def evolve(tprime: float, params: CouplingParams) -> GaussianState:
    """Three-mode state at scaled time t': zero mean, covariance S(t') V(0) S(t')^T.

    The covariance matrix is assembled directly from the closed-form
    coefficients, which makes the block sign pattern and symmetry exact.
    """
    q0, q1, q2, t0, t1, t2 = (float(x) for x in closed_coefficients(float(tprime), params))
    cm = np.array(
        [
            [q0, 0.0, t2, 0.0, -t1, 0.0],
            [0.0, q0, 0.0, -t2, 0.0, -t1],
            [t2, 0.0, q1, 0.0, t0, 0.0],
            [0.0, -t2, 0.0, q1, 0.0, -t0],
            [-t1, 0.0, t0, 0.0, q2, 0.0],
            [0.0, -t1, 0.0, -t0, 0.0, q2],
        ]
    )
    return GaussianState(n_modes=3, mean=np.zeros(6), cm=cm)


def coefficients(tprime: float, params: CouplingParams) -> CmCoefficients:
    """Extract (q0, q1, q2, t0, t1, t2) from the evolved covariance matrix.

    Asserts the three-mode block pattern (X/P sectors unmixed, paired entries
    with the expected signs); a violation signals a dynamics bug rather than
    bad input.
    """
    cm = evolve(tprime, params).cm
    scale = max(1.0, float(np.max(np.abs(cm))))
    tol = 1e-9 * scale

    pattern_zeros = np.array(
        [cm[i, j] for i in range(6) for j in range(6) if (i + j) % 2 == 1]
    )
    if np.max(np.abs(pattern_zeros)) > tol:
        raise RuntimeError("dynamics bug: X/P sectors mixed in evolved covariance")
    pairs = [
        (cm[0, 0], cm[1, 1]),
        (cm[2, 2], cm[3, 3]),
        (cm[4, 4], cm[5, 5]),
        (cm[0, 2], -cm[1, 3]),
        (cm[0, 4], cm[1, 5]),
        (cm[2, 4], -cm[3, 5]),
    ]
    for a, b in pairs:
        if abs(a - b) > tol:
            raise RuntimeError("dynamics bug: evolved covariance violates the sign pattern")
    return CmCoefficients(
        q0=cm[0, 0], q1=cm[2, 2], q2=cm[4, 4], t0=cm[2, 4], t1=-cm[0, 4], t2=cm[0, 2]
    )


def pair_modes(k: int) -> tuple[int, int]:
    """Remaining mode pair (i, j), ascending, after discarding mode k."""
    if k not in (0, 1, 2):
        raise ValueError("mode index k must be 0, 1 or 2")
    i, j = (m for m in range(3) if m != k)
    return i, j


def _sigma_sq(r: float, sign: int, dtype=np.float64):
    """(s + sign*c)^2, i.e. (r+1)/(r-1) or (r-1)/(r+1), cancellation-free via m = r - 1."""
    m = dtype(r) - dtype(1)
    if sign > 0:
        return (m + dtype(2)) / m
    return m / (m + dtype(2))


def pair_variance_sum(tprime, params: CouplingParams, k: int, sign: int, dtype=np.float64):
    """Stable Q_i + Q_j + 2*sign*T_k for the mode pair left after discarding k.

    This is the sum/difference quadrature variance of the traced-out channel
    before any sign convention is applied to the off-diagonal couplings.  The
    naive entry combination cancels catastrophically near r = 1; these forms
    are sums of non-negative terms.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    pair_modes(k)
    c, s = _cs_pair(params.r, dtype)
    q = dtype(params.nbar) + dtype(0.5)
    kap = c * c + s * s
    tr = _trig(tprime, dtype)
    sn, v, cs = tr.sn, tr.v, tr.cs
    half = dtype(0.5)
    u = dtype(sign)
    if k == 0:
        return _sigma_sq(params.r, sign, dtype) * (q * sn * sn + half * kap * v * v) + cs
    if k == 2:
        w = c * v + u * sn
        return q * (cs + u * c * sn) ** 2 + half * kap * (w + c / kap) ** 2 + s * s / (2 * kap)
    # k == 1
    y = s * v - u * sn
    return q * (cs - u * s * sn) ** 2 + half * kap * (y - s / kap) ** 2 + c * c / (2 * kap)


def pair_het_reduction(tprime, params: CouplingParams, k: int, sign: int, dtype=np.float64):
    """Stable (T_i - sign*T_j)^2 / (Q_k + 1/2): the heterodyne variance reduction term."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    pair_modes(k)
    c, s = _cs_pair(params.r, dtype)
    q = dtype(params.nbar) + dtype(0.5)
    kap = c * c + s * s
    tr = _trig(tprime, dtype)
    sn, v, cs = tr.sn, tr.v, tr.cs
    half = dtype(0.5)
    u = dtype(sign)
    q0, q1, q2, *_ = closed_coefficients(tprime, params, dtype)
    if k == 0:
        # T1 - u T2 with (i, j) = (1, 2)
        sig_m = np.sqrt(_sigma_sq(params.r, -1, dtype))
        sig_p = np.sqrt(_sigma_sq(params.r, +1, dtype))
        if sign > 0:
            lo, hi = sig_m, sig_p
        else:
            lo, hi = sig_p, sig_m
        diff = sn * (half * lo - hi * (half * kap * v + q * cs))
        qk = q0
    elif k == 1:
        # T0 - u T2 with (i, j) = (0, 2)
        diff = c * (s * (q * sn * sn + half * kap * v * v) - u * sn * (q * cs + half * (1 + kap * v)))
        qk = q1
    else:
        # T0 - u T1 with (i, j) = (0, 1)
        diff = s * (c * (q * sn * sn + half * kap * v * v) - u * sn * (half * (1 - kap * v) - q * cs))
        qk = q2
    return diff * diff / (qk + half)


def pair_het_variance_sum(tprime, params: CouplingParams, k: int, sign: int, dtype=np.float64):
    """Stable Q_i + Q_j + 2*sign*T_k - (T_i - sign*T_j)^2/(Q_k + 1/2).

    The full sum/difference quadrature variance of the heterodyne-distilled
    channel.  Both pieces reach ~1/(r-1)^2 with an O(1) difference, so they
    are never evaluated separately here: the jointly simplified numerator
    N = (sum)*(Q_k + 1/2) - (correction numerator) collapses to products of
    stable factors (for k = 2 a perfect square), and the division by
    Q_k + 1/2 is benign.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    pair_modes(k)
    c, s = _cs_pair(params.r, dtype)
    m = dtype(params.r) - dtype(1)
    q = dtype(params.nbar) + dtype(0.5)
    tr = _trig(tprime, dtype)
    sn, v, cs = tr.sn, tr.v, tr.cs
    half = dtype(0.5)
    u = dtype(sign)
    if k == 0:
        if sign > 0:
            gam = c * (c + s)
            numer = q * (1 + gam * v) ** 2 + c * c * v * v * (gam + half) + gam * v + half
        else:
            mp2 = m + 2
            numer = (
                q * (m + 2 * tr.half_cs * tr.half_cs) ** 2 / (mp2 * mp2)
                + v * v / (2 * mp2 * mp2)
                + (m + 2 * cs) / (2 * mp2)
            )
        qk = q * cs * cs + half * (c * c + s * s) * sn * sn
    elif k == 1:
        qpart = (c * c * v + u * s * sn - cs) ** 2 + c * c * v * (1 + cs)
        nonq = (c * c * v * s * (s * v - 2 * u * sn) + (cs + u * s * sn) ** 2) / 2
        numer = q * qpart + nonq
        qk = q * c * c * sn * sn + half * ((1 + c * c * v) ** 2 + (c * s * v) ** 2)
    else:
        edge = 2 * (c * tr.half_sn + u * tr.half_cs / 2) ** 2 + (1 + tr.half_sn * tr.half_sn) / 2
        numer = (q + half) * edge * edge
        qk = q * s * s * sn * sn + half * ((c * s * v) ** 2 + (1 - s * s * v) ** 2)
    return numer / (qk + half)


def pair_x_determinant(tprime, params: CouplingParams, k: int, dtype=np.float64):
    """Stable Q_i Q_j - T_k^2: the X-sector determinant of the traced-out pair.

    Equal for the P sector; the pair's covariance determinant is its square.
    All three reduce to sums of non-negative terms.
    """
    pair_modes(k)
    c, s = _cs_pair(params.r, dtype)
    q = dtype(params.nbar) + dtype(0.5)
    kap = c * c + s * s
    tr = _trig(tprime, dtype)
    sn, v, cs = tr.sn, tr.v, tr.cs
    half = dtype(0.5)
    quarter = dtype(0.25)
    if k == 0:
        return half * kap * q * sn * sn + quarter * cs * cs
    if k == 1:
        return q * ((c * s * v) ** 2 + half * (c * c * sn * sn + 1)) + quarter * c * c * sn * sn
    # k == 2
    return q * (half * kap * (s * v - s / kap) ** 2 + c * c / (2 * kap)) + quarter * s * s * sn * sn
