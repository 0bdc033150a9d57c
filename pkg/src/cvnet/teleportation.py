"""Continuous-variable teleportation through a two-mode Gaussian channel.

The protocol is sign-matched to the channel's EPR correlations: for EPR+
Alice measures (x_+, p_-), for EPR- she measures (x_-, p_+), where
x_± = (X_A ± X_in)/sqrt(2) and p_± = (P_A ± P_in)/sqrt(2) are the
beam-splitter output quadratures.  Bob corrects with the communicated
outcome plus an extra displacement delta that can cancel a known channel
drift.  For a pure input the fidelity reduces to a 2x2 determinant plus a
Gaussian damping factor from any uncancelled drift.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianState

__all__ = [
    "EprSign",
    "ChannelClass",
    "StandardForm",
    "Channel",
    "FidelityResult",
    "optimal_displacement",
    "fidelity_general",
    "fidelity_coherent_standard",
    "classify_channel",
]

_SQRT2 = math.sqrt(2.0)
_R_FLIP = np.diag([1.0, -1.0])


class EprSign(enum.Enum):
    """Which EPR correlation the protocol exploits (selects Alice's quadrature pair)."""

    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return self.value


class ChannelClass(enum.Enum):
    EPR_CHANNEL = "epr_channel"
    SYMMETRIC_CLASSICAL = "symmetric_classical"
    GENERAL = "general"


@dataclass(frozen=True)
class StandardForm:
    """Standard-form parameters (a, b, c, c') of a two-mode covariance matrix.

    The matrix is diag-blocked: Alice block a*I, Bob block b*I, cross block
    diag(c, c').  ``var_x_plus`` etc. are the sum/difference quadrature
    variances a + b +/- 2c and a + b +/- 2c'.  Callers that know the channel's
    provenance may supply these to better accuracy than the rounded
    (a, b, c, c') admit (near r = 1 the direct combinations cancel to below
    double precision); by default they are computed naively.
    """

    a: float
    b: float
    c: float
    c_prime: float
    var_x_plus: float | None = None
    var_x_minus: float | None = None
    var_p_plus: float | None = None
    var_p_minus: float | None = None

    def __post_init__(self) -> None:
        defaults = {
            "var_x_plus": self.a + self.b + 2.0 * self.c,
            "var_x_minus": self.a + self.b - 2.0 * self.c,
            "var_p_plus": self.a + self.b + 2.0 * self.c_prime,
            "var_p_minus": self.a + self.b - 2.0 * self.c_prime,
        }
        for name, value in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)
            elif getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def var_x(self, sign: int) -> float:
        return self.var_x_plus if sign > 0 else self.var_x_minus

    def var_p(self, sign: int) -> float:
        return self.var_p_plus if sign > 0 else self.var_p_minus

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.a, 0.0, self.c, 0.0],
                [0.0, self.a, 0.0, self.c_prime],
                [self.c, 0.0, self.b, 0.0],
                [0.0, self.c_prime, 0.0, self.b],
            ]
        )


@dataclass(frozen=True)
class Channel:
    """Distilled two-mode Gaussian channel shared by Alice and Bob.

    ``cm`` is ordered (X_A, P_A, X_B, P_B); ``drift`` is the known nonzero
    mean in the same ordering (for heterodyne-distilled channels it encodes
    the communicated outcome; it is what Bob's extra displacement cancels).
    """

    alice_mode: int
    bob_mode: int
    cm: np.ndarray
    drift: np.ndarray
    standard_form: StandardForm | None = None

    def __post_init__(self) -> None:
        state = GaussianState(n_modes=2, mean=self.drift, cm=self.cm)
        object.__setattr__(self, "cm", state.cm)
        object.__setattr__(self, "drift", state.mean)
        if self.alice_mode == self.bob_mode:
            raise ValueError("alice_mode and bob_mode must differ")
        if self.standard_form is not None:
            ref = self.standard_form.matrix()
            scale = max(1.0, float(np.max(np.abs(ref))))
            if np.max(np.abs(self.cm - ref)) > 1e-12 * scale:
                raise ValueError("cm does not match the declared standard form")

    @classmethod
    def from_state(
        cls,
        state: GaussianState,
        alice_mode: int,
        bob_mode: int,
        standard_form: StandardForm | None = None,
    ) -> "Channel":
        if state.n_modes != 2:
            raise ValueError("channel state must have exactly 2 modes")
        return cls(
            alice_mode=alice_mode,
            bob_mode=bob_mode,
            cm=state.cm,
            drift=state.mean,
            standard_form=standard_form,
        )

    @property
    def d_components(self) -> np.ndarray:
        """Drift in its (d1, d2, d3, d4) parametrization: mean = sqrt(2) (d1, d2, d3, d4)."""
        return self.drift / _SQRT2


@dataclass(frozen=True)
class FidelityResult:
    """Teleportation fidelity with its determinant and drift-damping parts.

    fidelity = exp(-q_term) / sqrt(det(e_matrix)); q_term vanishes exactly
    when ``delta_used`` equals the optimal displacement.
    """

    fidelity: float
    e_matrix: np.ndarray
    q_term: float
    delta_used: complex

    def __post_init__(self) -> None:
        if not 0.0 < self.fidelity <= 1.0 + 1e-12:
            raise ValueError(f"fidelity out of range: {self.fidelity}")
        if self.q_term < 0:
            raise ValueError("q_term must be non-negative")


def optimal_displacement(channel: Channel, sign: EprSign) -> complex:
    """Bob's extra displacement that exactly cancels the channel drift.

    With drift components (d1, d2, d3, d4):
    Re(delta) = -(sign) d1 - d3 and Im(delta) = (sign) d2 - d4.
    """
    d1, d2, d3, d4 = channel.d_components
    u = sign.sign
    return complex(-u * d1 - d3, u * d2 - d4)


def _validate_pure_input(input_cm: np.ndarray) -> np.ndarray:
    v = np.asarray(input_cm, dtype=float)
    if v.shape != (2, 2):
        raise ValueError("input_cm must be 2x2")
    if np.max(np.abs(v - v.T)) > 1e-12 * max(1.0, float(np.max(np.abs(v)))):
        raise ValueError("input_cm must be symmetric")
    det = v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0]
    if abs(det - 0.25) > 1e-9 or v[0, 0] <= 0:
        raise ValueError("input must be a pure single-mode Gaussian state (det cm = 1/4)")
    return v


def fidelity_general(
    input_cm: np.ndarray,
    channel: Channel,
    sign: EprSign,
    delta: complex = 0j,
) -> FidelityResult:
    """Teleportation fidelity of a pure Gaussian input through ``channel``.

    The added-noise matrix is E = 2 V_in + R A R + B +/- (R C + C^T R^T) with
    R = diag(1, -1) and (A, B, C) the channel blocks; the fidelity is
    det(E)^(-1/2) exp(-Q) with Q = D E^(-1) D^T collecting the net drift
    after Bob's displacement ``delta``.  The input mean never enters.
    """
    v_in = _validate_pure_input(input_cm)
    delta = complex(delta)
    if not (math.isfinite(delta.real) and math.isfinite(delta.imag)):
        raise ValueError("delta must be finite")
    u = sign.sign
    a_blk = channel.cm[:2, :2]
    b_blk = channel.cm[2:, 2:]
    c_blk = channel.cm[:2, 2:]
    r = _R_FLIP
    e = 2.0 * v_in + r @ a_blk @ r + b_blk + u * (r @ c_blk + c_blk.T @ r.T)
    e = 0.5 * (e + e.T)
    det_e = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
    if det_e <= 0 or e[0, 0] <= 0:
        raise ValueError("added-noise matrix is singular; channel is not physical")
    d1, d2, d3, d4 = channel.d_components
    d_vec = np.array([-delta.real - u * d1 - d3, -delta.imag + u * d2 - d4])
    q_term = float(d_vec @ np.linalg.solve(e, d_vec))
    fidelity = math.exp(-q_term) / math.sqrt(det_e)
    return FidelityResult(fidelity=fidelity, e_matrix=e, q_term=q_term, delta_used=delta)


def fidelity_coherent_standard(channel: Channel, sign: EprSign) -> float:
    """Coherent-input fidelity of a standard-form channel from its quadrature variances.

    F_± = [(1 + Var(X_±)) (1 + Var(P_∓))]^(-1/2).  Uses the stored variance
    combinations, so channels built by the network layer stay accurate in
    the strong-squeezing regime where a + b - 2c cancels catastrophically.
    """
    if channel.standard_form is None:
        raise ValueError("channel has no standard form")
    u = sign.sign
    sf = channel.standard_form
    return 1.0 / math.sqrt((1.0 + sf.var_x(u)) * (1.0 + sf.var_p(-u)))


def classify_channel(channel: Channel, tol: float = 1e-10) -> ChannelClass:
    """EPR channel (c' = -c), symmetric classical (c' = c != 0), or general.

    For an EPR channel the teleportation criterion is checked for internal
    consistency: Var(X_±) < 1 must coincide with F_± > 1/2.
    """
    if channel.standard_form is None:
        raise ValueError("channel has no standard form")
    sf = channel.standard_form
    scale = max(1.0, abs(sf.c), abs(sf.c_prime))
    if abs(sf.c) <= tol * scale and abs(sf.c_prime) <= tol * scale:
        return ChannelClass.GENERAL
    if abs(sf.c_prime + sf.c) <= tol * scale:
        for sign in (EprSign.PLUS, EprSign.MINUS):
            var = sf.var_x(sign.sign)
            if abs(var - 1.0) < 1e-12:
                continue
            f = fidelity_coherent_standard(channel, sign)
            if (var < 1.0) != (f > 0.5):
                raise RuntimeError("EPR-channel criterion inconsistency (numerical bug)")
        return ChannelClass.EPR_CHANNEL
    if abs(sf.c_prime - sf.c) <= tol * scale:
        return ChannelClass.SYMMETRIC_CLASSICAL
    return ChannelClass.GENERAL
