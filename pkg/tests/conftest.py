"""Shared oracles and generators for the test suite.

The oracles here are deliberately independent of the library's closed-form
algebra: covariance propagation is re-done by brute-force ODE integration
and by high-precision matrix exponentials, and measurement updates by
truncated Fock-space projection.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from cvnet.dynamics import CouplingParams, generator

# property tests double as acceptance evidence: keep them reproducible
settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")


def rk4_covariance(tprime: float, params: CouplingParams, h: float = 1e-4) -> np.ndarray:
    """Fourth-order Runge-Kutta integration of dV/dt' = G V + V G^T from the initial state."""
    g = generator(params.r)
    v = np.diag([params.nbar + 0.5] * 2 + [0.5] * 4)

    def deriv(m: np.ndarray) -> np.ndarray:
        return g @ m + m @ g.T

    t = 0.0
    target = float(tprime)
    while t < target - 1e-15:
        step = min(h, target - t)
        k1 = deriv(v)
        k2 = deriv(v + 0.5 * step * k1)
        k3 = deriv(v + 0.5 * step * k2)
        k4 = deriv(v + step * k3)
        v = v + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += step
    return v


def mp_covariance(tprime, params: CouplingParams, dps: int = 50):
    """Covariance matrix via mpmath matrix exponential at ``dps`` digits.

    Independent of every closed form in the library: only the generator
    layout is shared (itself checked against the Fock oracle).
    """
    from mpmath import mp, mpf, expm, matrix

    with mp.workdps(dps):
        # mpf(float) converts the binary double exactly; a repr() round-trip
        # would shift r - 1 by ~4e-10 relative at the extreme working point
        r = mpf(params.r)
        m = r - 1
        c = 1 / mp.sqrt(m * (m + 2))
        s = mp.sqrt(c * c + 1)
        g = matrix(6, 6)
        g[0, 2] = c
        g[0, 4] = -s
        g[1, 3] = -c
        g[1, 5] = -s
        g[2, 0] = c
        g[3, 1] = -c
        g[4, 0] = s
        g[5, 1] = s
        smat = expm(g * mpf(float(tprime)))
        v0 = matrix(6, 6)
        q = mpf(params.nbar) + mpf(1) / 2
        for idx in range(6):
            v0[idx, idx] = q if idx < 2 else mpf(1) / 2
        v = smat * v0 * smat.T
        return v


def mp_naive_combinations(tp, params: CouplingParams, dps: int = 60):
    """Naive high-precision variance combinations from the coefficient formulas.

    Differential oracle for the regrouped stable forms: the coefficient
    formulas themselves are pinned against the matrix-exponential and Fock
    oracles elsewhere, and here they are combined the cancellation-prone way
    at ``dps`` digits.  Returns ({(k, sign): sum}, {(k, sign): het_sum},
    {k: x_determinant}).
    """
    from mpmath import mp, mpf

    with mp.workdps(dps):
        r = mpf(params.r)
        m = r - 1
        c = 1 / mp.sqrt(m * (m + 2))
        s = mp.sqrt(c * c + 1)
        kap = c * c + s * s
        q = mpf(params.nbar) + mpf(1) / 2
        t = mpf(float(tp))
        sn = mp.sin(t)
        v = 1 - mp.cos(t)
        qs = [
            q * (1 - v) ** 2 + kap * sn**2 / 2,
            q * c * c * sn**2 + (1 + c * c * v) ** 2 / 2 + (c * s * v) ** 2 / 2,
            q * s * s * sn**2 + (c * s * v) ** 2 / 2 + (1 - s * s * v) ** 2 / 2,
        ]
        ts = [
            c * s * (q * sn**2 + kap * v**2 / 2),
            s * sn * ((1 - kap * v) / 2 - q * (1 - v)),
            c * sn * (q * (1 - v) + (1 + kap * v) / 2),
        ]
        sums, het_sums, dets = {}, {}, {}
        for k in range(3):
            i, j = (mode for mode in range(3) if mode != k)
            dets[k] = float(qs[i] * qs[j] - ts[k] ** 2)
            for sign in (1, -1):
                total = qs[i] + qs[j] + 2 * sign * ts[k]
                sums[k, sign] = float(total)
                het_sums[k, sign] = float(
                    total - (ts[i] - sign * ts[j]) ** 2 / (qs[k] + mpf(1) / 2)
                )
        return sums, het_sums, dets


def fock_ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def fock_three_mode(dim: int, r: float):
    """Truncated Fock-space machinery: ladder ops and the scaled-time Hamiltonian."""
    a = fock_ladder(dim)
    eye = np.eye(dim)
    ops = []
    for k in range(3):
        mats = [eye, eye, eye]
        mats[k] = a
        ops.append(np.kron(np.kron(mats[0], mats[1]), mats[2]))
    c = 1.0 / np.sqrt(r * r - 1.0)
    s = r / np.sqrt(r * r - 1.0)
    ham = -1j * c * (ops[1] @ ops[0] - ops[1].conj().T @ ops[0].conj().T)
    ham = ham - 1j * s * (ops[2] @ ops[0].conj().T - ops[2].conj().T @ ops[0])
    return ops, ham


def fock_quadratures(ops):
    quads = []
    for op in ops:
        quads.append((op + op.conj().T) / np.sqrt(2))
        quads.append((op - op.conj().T) / (1j * np.sqrt(2)))
    return quads


def fock_moments(psi: np.ndarray, quads) -> tuple[np.ndarray, np.ndarray]:
    means = np.array([np.real(psi.conj() @ (q @ psi)) for q in quads])
    n = len(quads)
    cm = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            sym = quads[i] @ quads[j] + quads[j] @ quads[i]
            cm[i, j] = 0.5 * np.real(psi.conj() @ (sym @ psi)) - means[i] * means[j]
    return means, cm


def coherent_vector(alpha: complex, dim: int) -> np.ndarray:
    from scipy.special import gammaln

    n = np.arange(dim)
    if alpha == 0:
        vec = np.zeros(dim, dtype=complex)
        vec[0] = 1.0
        return vec
    log_terms = n * np.log(complex(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(-0.5 * abs(alpha) ** 2 + log_terms)


def random_physical_standard_form(rng: np.random.Generator):
    """Random O(1)-scale physical (a, b, c, c') standard-form parameters."""
    from cvnet.gaussian import GaussianState
    from cvnet.teleportation import StandardForm

    while True:
        a = 0.5 + rng.exponential(0.8)
        b = 0.5 + rng.exponential(0.8)
        bound = np.sqrt((a - 0.5) * (b - 0.5))
        c = rng.uniform(-1.0, 1.0) * bound
        c_prime = rng.uniform(-1.0, 1.0) * bound
        sf = StandardForm(a=a, b=b, c=c, c_prime=c_prime)
        try:
            GaussianState(n_modes=2, mean=np.zeros(4), cm=sf.matrix())
        except ValueError:
            continue
        return sf


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=20240817))
