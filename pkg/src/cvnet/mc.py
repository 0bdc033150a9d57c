"""Operational Monte Carlo check of the teleportation protocol.

Runs the physical measurement chain sample by sample - mix the input with
Alice's mode on a balanced beam splitter, draw the two commuting measured
quadratures from their exact Gaussian marginal, condition Bob's mode,
displace it with the communicated outcome - and averages output moments
and per-sample input/output overlaps.  Nothing here touches the closed
fidelity formulas, so agreement with them is an end-to-end protocol check.

Randomness comes from the counter-based Philox generator: logical block b
of fixed size uses the key (seed XOR b), and block results merge in index
order, so estimates are bit-identical for a given (seed, n_samples,
block_size) no matter how many workers run.  Per sample exactly two
uniforms are consumed and turned into normals by Box-Muller.

Conditioning arithmetic runs in extended precision: squeezed channels make
the conditional covariance a near-total cancellation, and the systematic
error must stay far below the statistical one.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .teleportation import Channel, EprSign

__all__ = ["McConfig", "McResult", "run_protocol"]

_LD = np.longdouble
_MAX_SAMPLES = 2**40


@dataclass(frozen=True)
class McConfig:
    """Sample count, RNG seed, coherent input amplitude, and sharding layout.

    Statistical acceptance checks assume n_samples >= 1e3.  Estimates are a
    deterministic function of (seed, n_samples, block_size, input_amplitude);
    ``workers`` only changes how blocks are scheduled.
    """

    n_samples: int
    seed: int
    input_amplitude: complex = 0j
    block_size: int = 8192
    workers: int = 1

    def __post_init__(self) -> None:
        if not 2 <= self.n_samples <= _MAX_SAMPLES:
            raise ValueError(f"n_samples must be in [2, {_MAX_SAMPLES}]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        amp = complex(self.input_amplitude)
        if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
            raise ValueError("input_amplitude must be finite")
        if self.block_size < 1:
            raise ValueError("block_size must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass(frozen=True)
class McResult:
    """Estimated output mean/covariance and fidelity with standard errors."""

    mean: np.ndarray
    mean_se: np.ndarray
    cm: np.ndarray
    cm_se: np.ndarray
    fidelity: float
    std_error: float
    n_samples: int


def _chol2(m: np.ndarray) -> np.ndarray:
    """Cholesky factor of a 2x2 SPD matrix, eigendecomposition fallback near singularity."""
    a, b, c = m[0, 0], m[0, 1], m[1, 1]
    if a > 0:
        l11 = np.sqrt(a)
        l21 = b / l11
        rest = c - l21 * l21
        if rest >= 0:
            return np.array([[l11, 0.0], [l21, np.sqrt(rest)]], dtype=m.dtype)
    # nearly singular marginal (extreme squeezing): square root via eigenpairs
    w, v = np.linalg.eigh(np.asarray(m, dtype=float))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)).astype(m.dtype)


def _measurement_rows(sign: EprSign) -> np.ndarray:
    """Rows mapping (X_in, P_in, X_A, P_A, X_B, P_B) to Alice's measured pair."""
    inv_sqrt2 = 1.0 / np.sqrt(_LD(2))
    rows = np.zeros((2, 6), dtype=_LD)
    if sign is EprSign.PLUS:  # measure x_+ = (X_A + X_in)/sqrt2, p_- = (P_A - P_in)/sqrt2
        rows[0, 0] = inv_sqrt2
        rows[0, 2] = inv_sqrt2
        rows[1, 1] = -inv_sqrt2
        rows[1, 3] = inv_sqrt2
    else:  # measure x_- = (X_A - X_in)/sqrt2, p_+ = (P_A + P_in)/sqrt2
        rows[0, 0] = -inv_sqrt2
        rows[0, 2] = inv_sqrt2
        rows[1, 1] = inv_sqrt2
        rows[1, 3] = inv_sqrt2
    return rows


def _block_normals(seed: int, block: int, n: int) -> np.ndarray:
    """(n, 2) standard normals for logical block ``block``: Philox keyed by seed XOR block."""
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed) ^ np.uint64(block)))
    u = gen.random((n, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def run_protocol(
    channel: Channel, sign: EprSign, delta: complex, cfg: McConfig
) -> McResult:
    """Estimate Bob's output state and the teleportation fidelity by sampling.

    Per sample: draw Alice's commuting quadrature pair from the joint
    (input, channel) Gaussian after the beam splitter, form Bob's Gaussian
    conditional state, displace it by the outcome-dependent correction plus
    ``delta``, and record the exact Gaussian overlap with the coherent input.
    The overlap is linear in the state, so its sample mean converges to the
    fidelity of the averaged output.
    """
    delta = complex(delta)
    if not (math.isfinite(delta.real) and math.isfinite(delta.imag)):
        raise ValueError("delta must be finite")
    sqrt2 = np.sqrt(_LD(2))

    amp = complex(cfg.input_amplitude)
    mean_in = sqrt2 * np.array([amp.real, amp.imag], dtype=_LD)
    mu = np.concatenate([mean_in, np.asarray(channel.drift, dtype=_LD)])
    sigma = np.zeros((6, 6), dtype=_LD)
    sigma[:2, :2] = np.eye(2, dtype=_LD) / 2
    sigma[2:, 2:] = np.asarray(channel.cm, dtype=_LD)

    rows = _measurement_rows(sign)
    sigma_yy = rows @ sigma @ rows.T
    mu_y = rows @ mu
    sigma_by = sigma[4:6, :] @ rows.T
    det_yy = sigma_yy[0, 0] * sigma_yy[1, 1] - sigma_yy[0, 1] * sigma_yy[1, 0]
    if det_yy <= 0:
        raise ValueError("measured marginal is singular; channel is not physical")
    inv_yy = (
        np.array(
            [[sigma_yy[1, 1], -sigma_yy[0, 1]], [-sigma_yy[1, 0], sigma_yy[0, 0]]],
            dtype=_LD,
        )
        / det_yy
    )
    gain = sigma_by @ inv_yy
    cond_cm = sigma[4:6, 4:6] - gain @ sigma_by.T
    cond_cm = (cond_cm + cond_cm.T) / 2
    chol_yy = _chol2(sigma_yy)

    # fixed per-sample overlap kernel: input cm + conditional cm
    overlap = np.eye(2, dtype=_LD) / 2 + cond_cm
    det_ov = overlap[0, 0] * overlap[1, 1] - overlap[0, 1] * overlap[1, 0]
    inv_ov = (
        np.array(
            [[overlap[1, 1], -overlap[0, 1]], [-overlap[1, 0], overlap[0, 0]]], dtype=_LD
        )
        / det_ov
    )
    norm = 1.0 / np.sqrt(det_ov)
    delta_shift = sqrt2 * np.array([delta.real, delta.imag], dtype=_LD)

    def run_block(block: int) -> tuple[np.ndarray, ...]:
        lo = block * cfg.block_size
        nb = min(cfg.block_size, cfg.n_samples - lo)
        z = _block_normals(cfg.seed, block, nb).astype(_LD)
        dev = z @ chol_yy.T                      # y - mu_y per sample
        y = dev + mu_y
        # communicated outcome gamma' as a complex shift of Bob's mode
        if sign is EprSign.PLUS:
            shift = np.column_stack([y[:, 0], -y[:, 1]])
        else:
            shift = np.column_stack([-y[:, 0], y[:, 1]])
        m_out = mu[4:6] + dev @ gain.T + sqrt2 * shift + delta_shift
        d = m_out - mean_in
        quad = (
            d[:, 0] * d[:, 0] * inv_ov[0, 0]
            + 2 * d[:, 0] * d[:, 1] * inv_ov[0, 1]
            + d[:, 1] * d[:, 1] * inv_ov[1, 1]
        )
        f = norm * np.exp(-quad / 2)
        return (
            np.array([f.sum(), (f * f).sum()], dtype=_LD),
            m_out.sum(axis=0),
            m_out.T @ m_out,
            np.array([nb], dtype=_LD),
        )

    n_blocks = -(-cfg.n_samples // cfg.block_size)
    if cfg.workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            partials = list(pool.map(run_block, range(n_blocks)))
    else:
        partials = [run_block(b) for b in range(n_blocks)]

    f_acc = np.zeros(2, dtype=_LD)
    m_acc = np.zeros(2, dtype=_LD)
    mm_acc = np.zeros((2, 2), dtype=_LD)
    for f_part, m_part, mm_part, _ in partials:  # fixed merge order
        f_acc = f_acc + f_part
        m_acc = m_acc + m_part
        mm_acc = mm_acc + mm_part

    n = _LD(cfg.n_samples)
    fid = f_acc[0] / n
    fid_var = max(f_acc[1] / n - fid * fid, _LD(0)) * n / (n - 1)
    fid_se = np.sqrt(fid_var / n)

    mean_out = m_acc / n
    cov_means = (mm_acc / n - np.outer(mean_out, mean_out)) * n / (n - 1)
    cm_out = cov_means + cond_cm
    mean_se = np.sqrt(np.diag(cov_means).astype(float) / float(n))
    c = np.asarray(cov_means, dtype=float)
    cm_se = np.sqrt((np.outer(np.diag(c), np.diag(c)) + c * c) / float(n))

    return McResult(
        mean=np.asarray(mean_out, dtype=float),
        mean_se=mean_se,
        cm=np.asarray(cm_out, dtype=float),
        cm_se=cm_se,
        fidelity=float(fid),
        std_error=float(fid_se),
        n_samples=cfg.n_samples,
    )
