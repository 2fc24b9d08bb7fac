"""Information content of receiver arrays.

Effective-rank measurements of coupling/sensing spectra, the dense-array
asymptotic rank predictions for vertical and horizontal apertures, the
Taylor-moment rank predictions for arrays much smaller than a
wavelength, and the dispersion-relation collapse of the moment span.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySpectrum
from .modes import ModeSet


# ---------------------------------------------------------------------------
# effective rank

@dataclass(frozen=True)
class AbsoluteThreshold:
    """Count spectrum entries >= eps (inclusive)."""

    eps: float


@dataclass(frozen=True)
class PlateauHalf:
    """Count spectrum entries >= half the top entry; the natural measure
    for dense-aperture spectra, which plateau then fall off."""


def effective_rank(spectrum, mode):
    spectrum = np.asarray(spectrum, dtype=float)
    if spectrum.size == 0:
        raise EmptySpectrum("cannot rank an empty spectrum")
    if isinstance(mode, PlateauHalf):
        thr = 0.5 * spectrum[0]
    else:
        thr = mode.eps
    return int(np.count_nonzero(spectrum >= thr))


@dataclass
class SpectrumReport:
    """A descending spectrum with the rank measurement applied to it."""

    spectrum: np.ndarray
    effective_rank: int
    threshold: float
    plateau: float = None


def spectrum_report(spectrum, mode):
    spectrum = np.asarray(spectrum, dtype=float)
    r = effective_rank(spectrum, mode)
    if isinstance(mode, PlateauHalf):
        thr = 0.5 * spectrum[0]
        plateau = float(np.median(spectrum[:r])) if r else None
    else:
        thr, plateau = mode.eps, None
    return SpectrumReport(spectrum=spectrum, effective_rank=r,
                          threshold=float(thr), plateau=plateau)


# ---------------------------------------------------------------------------
# dense-aperture predictions

def dense_rank_prediction(kind, intervals, lambda_o, N):
    """Asymptotic effective rank of a dense aperture of segments
    (b_k, a_k): vertical 4 sum(a_k)/lambda_o = N (2 sum a_k)/L,
    horizontal 2 sum(a_k)/lambda_o = N sum(a_k)/L, capped at the mode
    count. Positions b_k do not enter."""
    total = sum(a for _, a in intervals)
    if kind == "vertical":
        pred = 4.0 * total / lambda_o
    elif kind == "horizontal":
        pred = 2.0 * total / lambda_o
    else:
        raise ValueError(f"kind must be 'vertical' or 'horizontal', got {kind!r}")
    return float(min(pred, N))


# ---------------------------------------------------------------------------
# small-array Taylor predictions

@dataclass(frozen=True)
class TaylorRank:
    Q: int
    linear: int
    planar: int


def taylor_rank_prediction(k_o_a, eps, n_cap=None):
    """Truncation order Q with (k_o a)^Q / Q! closest to eps in log scale,
    and the ranks it implies: Q for a linear array, 2Q - 1 for a planar
    one. The nearest-in-log reading reproduces the reference operating
    points (k_o a = 0.125 with eps = 1e-7 -> Q = 5, eps = 1e-4 -> Q = 3).
    """
    if not 0.0 < k_o_a < 1.0:
        raise ValueError("k_o_a must lie in (0, 1)")
    if eps >= 1.0:
        return TaylorRank(Q=0, linear=0, planar=0)
    target = math.log(eps)
    best_q, best_gap = 0, abs(0.0 - target)
    q = 0
    while True:
        q += 1
        val = q * math.log(k_o_a) - math.lgamma(q + 1)
        gap = abs(val - target)
        if gap < best_gap:
            best_q, best_gap = q, gap
        # terms decrease monotonically in log, so once past the target by
        # more than the best gap nothing later can win
        if val < target - best_gap:
            break
    linear = best_q if n_cap is None else min(best_q, n_cap)
    return TaylorRank(Q=best_q, linear=linear, planar=max(2 * best_q - 1, 0))


# ---------------------------------------------------------------------------
# moment family and span collapse

@dataclass
class MomentFamily:
    """Taylor moments of the sensing matrix about (0, z_a):
    u_{q,q'} = (beta_j^q phi_j^(q')(z_a))_j over modes and
    v_{q,q'} = (i^q/(q! q'!)) (x_k^q (z_k - z_a)^{q'})_k over receivers,
    for q + q' <= Q - 1, so that B ~ sum conj(v_{q,q'}) u_{q,q'}^T."""

    Q: int
    z_a: float
    u: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def reconstruct(self):
        """Rank-(#terms) approximation sum_{q+q'<=Q-1} conj(v) u^T of B."""
        first = next(iter(self.u))
        out = np.zeros((self.v[first].size, self.u[first].size), dtype=complex)
        for key, u in self.u.items():
            out += np.outer(np.conj(self.v[key]), u)
        return out


def moment_family(ms: ModeSet, z_a, points, Q):
    if Q < 1:
        raise ValueError("Q must be >= 1")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x = points[:, 0]
    ztil = points[:, 1] - z_a
    mf = MomentFamily(Q=Q, z_a=z_a)
    derivs = {qp: ms.profile_matrix(np.array([z_a]), q=qp)[0]
              for qp in range(Q)}
    for q in range(Q):
        for qp in range(Q - q):
            mf.u[(q, qp)] = ms.beta ** q * derivs[qp]
            mf.v[(q, qp)] = ((1j ** q) / (math.factorial(q) * math.factorial(qp))
                             * x ** q * ztil ** qp)
    return mf


@dataclass
class SpanRank:
    rank: int
    expected: int
    gap: float
    spectrum: np.ndarray


def span_rank_collapse(mf: MomentFamily):
    """Numerical rank of span{u_{q,q'}}: although Q(Q+1)/2 vectors are
    stacked, the dispersion relation ties beta powers to transverse
    derivatives and collapses the span to dimension 2Q - 1. Rank uses a
    relative 1e-9 cutoff; gap is the ratio of the last retained to the
    first discarded singular value (clean collapses show >= 1e3)."""
    rows = np.array([mf.u[k] for k in sorted(mf.u)])
    s = np.linalg.svd(rows, compute_uv=False)
    rank = int(np.count_nonzero(s >= 1e-9 * s[0]))
    if rank < s.size and s[rank] > 0:
        gap = float(s[rank - 1] / s[rank])
    else:
        gap = float("inf")
    return SpanRank(rank=rank, expected=2 * mf.Q - 1, gap=gap, spectrum=s)
