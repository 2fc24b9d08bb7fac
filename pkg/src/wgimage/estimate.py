"""Mode-amplitude estimation from array data.

Two routes to the amplitude vector: project data onto reduced mode
profiles and invert the coupling matrix A (any geometry), or apply a
regularized pseudo-inverse of the sensing matrix B (discrete receiver
sets). Both share the same spectral filters and the same analytic
bias/variance decomposition of the estimation error.

Spectral conventions, fixed for reproducibility: eigenvalues and
singular values in descending order, and each eigen/singular vector
phased so its largest-modulus entry is real positive.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    GeometryMismatch,
    QuadratureNotConverged,
    SingularUnregularized,
    TooFewReceivers,
)
from .modes import HomogeneousDD
from .synth import (
    DenseHorizontal,
    DenseVertical,
    Discrete,
    FieldSamples,
    array_samples,
    geometry_equal,
    mode_traces,
)


# ---------------------------------------------------------------------------
# regularizers

@dataclass(frozen=True)
class Tikhonov:
    """psi_eps(d) = d / (d^2 + eps^2)."""

    eps: float

    def filter(self, d):
        d = np.asarray(d, dtype=float)
        if self.eps == 0.0:
            return 1.0 / d
        return d / (d * d + self.eps * self.eps)


@dataclass(frozen=True)
class HardThreshold:
    """psi_eps(d) = (1/d) 1{d > eps}; eps = 0 gives the Moore-Penrose
    convention (zero weight on nonpositive spectrum)."""

    eps: float

    def filter(self, d):
        d = np.asarray(d, dtype=float)
        keep = d > self.eps
        out = np.zeros_like(d)
        out[keep] = 1.0 / d[keep]
        return out


def residual_diagonal(reg, d):
    """R^eps diagonal 1 - d psi_eps(d): the bias weight of each component."""
    return 1.0 - np.asarray(d, dtype=float) * reg.filter(d)


def _apply_filter(reg, d, floor_check=True):
    # reg=None means plain inversion, legal only on a safely nonsingular
    # spectrum; regularization must be explicit otherwise.
    d = np.asarray(d, dtype=float)
    if reg is None:
        if floor_check and np.min(d) < 1e-14 * np.max(d):
            raise SingularUnregularized(
                "spectrum spans more than 14 decades; pass a Regularizer")
        return 1.0 / d
    return reg.filter(d)


# ---------------------------------------------------------------------------
# operators

def _fix_phases(V):
    """Rotate each column so its largest-modulus entry is real positive.

    Returns the rotated matrix and the unit factors applied, so that a
    paired factor (U of an SVD) can be rotated consistently.
    """
    idx = np.argmax(np.abs(V), axis=0)
    lead = V[idx, np.arange(V.shape[1])]
    mod = np.abs(lead)
    phase = np.where(mod > 0, lead / np.where(mod > 0, mod, 1.0), 1.0)
    c = np.conj(phase)
    return V * c[None, :], c


@dataclass
class CouplingMatrix:
    """Hermitian PSD matrix A_jl = integral over the array of the mode
    trace products, with its eigendecomposition A = V diag(d) V^dag."""

    A: np.ndarray
    V: np.ndarray
    d: np.ndarray
    geometry: object


@dataclass
class SensingMatrix:
    """Receiver-by-mode matrix B_kj = phi_j(z_k) e^{-i beta_j x_k} with
    its thin SVD B = U diag(s) V^dag."""

    B: np.ndarray
    U: np.ndarray
    s: np.ndarray
    V: np.ndarray
    points: np.ndarray


def _eigh_descending(A):
    A = 0.5 * (A + A.conj().T)
    d, V = np.linalg.eigh(A)
    d, V = d[::-1], V[:, ::-1]
    V, _ = _fix_phases(V)
    return A, V, d


def _sinc(x):
    # unnormalized sinc sin(x)/x
    return np.sinc(x / np.pi)


def _coupling_vertical_dd(ms, geom):
    """Closed form for vertical segments in the sin basis: for each
    segment (b, h), (1/(2h)) int_{b-h}^{b+h} 2/L sin(a_j z) sin(a_l z) dz
    = (1/L)[cos((a_j-a_l)b) sinc((a_j-a_l)h) - cos((a_j+a_l)b) sinc((a_j+a_l)h)].
    Segments are weighted by length over total length."""
    al = ms.alpha
    dm = al[:, None] - al[None, :]
    dp = al[:, None] + al[None, :]
    total = sum(h for _, h in geom.segments())
    A = np.zeros((al.size, al.size))
    for b, h in geom.segments():
        A += (h / total) * (np.cos(dm * b) * _sinc(dm * h)
                            - np.cos(dp * b) * _sinc(dp * h))
    return A / ms.spec.L


def _coupling_horizontal_dd(ms, geom):
    """Closed form for horizontal segments at depth z_a: the transverse
    factor (2/L) sin(a_j z_a) sin(a_l z_a) times the range average of
    e^{i(beta_j - beta_l)x}."""
    s = np.sqrt(2.0 / ms.spec.L) * np.sin(ms.alpha * geom.z_a)
    db = ms.beta[:, None] - ms.beta[None, :]
    total = sum(h for _, h in geom.segments())
    xfac = np.zeros_like(db, dtype=complex)
    for b, h in geom.segments():
        xfac += (h / total) * np.exp(1j * db * b) * _sinc(db * h)
    return np.outer(s, s) * xfac


def _coupling_quadrature(ms, geom):
    """Gram matrix by composite Gauss-Legendre over mu, accepted once a
    doubled node budget moves it by less than 1e-10 relative."""
    def gram(refine):
        pts, w = array_samples(geom, ms.lambda_o, refine=refine)
        C = mode_traces(ms, pts)
        return C.conj().T @ (w[:, None] * C)

    prev = gram(1)
    for refine in (2, 4):
        cur = gram(refine)
        scale = max(np.linalg.norm(cur), 1e-300)
        if np.linalg.norm(cur - prev) <= 1e-10 * scale:
            return cur
        prev = cur
    raise QuadratureNotConverged(
        f"array Gram matrix not converged for {type(geom).__name__}")


def coupling_matrix(ms, geom):
    """Build A for an array geometry.

    Closed forms cover the homogeneous Dirichlet-Dirichlet dense vertical
    and horizontal apertures; discrete receiver sets use the exact Gram
    (1/M) B^dag B; everything else falls back to converged quadrature.
    """
    if isinstance(geom, Discrete):
        B = mode_traces(ms, geom.points)
        A = B.conj().T @ B / geom.points.shape[0]
    elif isinstance(geom, DenseVertical) and isinstance(ms.spec, HomogeneousDD):
        A = _coupling_vertical_dd(ms, geom)
    elif isinstance(geom, DenseHorizontal) and isinstance(ms.spec, HomogeneousDD):
        A = _coupling_horizontal_dd(ms, geom)
    else:
        A = _coupling_quadrature(ms, geom)
    A, V, d = _eigh_descending(A)
    return CouplingMatrix(A=A, V=V, d=d, geometry=geom)


def project_reduced(fs, cm, ms):
    """Project field samples onto the reduced mode profiles:
    b_l = int p conj(psi_l) dmu with psi_l = sum_j V_jl phi_j(z) e^{-i beta_j x}.

    For noiseless mode-sum data b = D V^dag a_o.
    """
    if not geometry_equal(fs.geometry, cm.geometry):
        raise GeometryMismatch("field samples and coupling matrix disagree on geometry")
    C = mode_traces(ms, fs.points)
    m = C.conj().T @ (fs.weights * fs.values)
    return cm.V.conj().T @ m


def estimate_amplitudes(b, cm, reg):
    """a_eps = V psi_eps(D) b; reg=None demands a nonsingular spectrum."""
    b = np.asarray(b)
    if b.shape != (cm.d.size,):
        raise GeometryMismatch(f"projection length {b.shape} != mode count {cm.d.size}")
    return cm.V @ (_apply_filter(reg, cm.d) * b)


def sensing_matrix(ms, points):
    """B_kj = phi_j(z_k) e^{-i beta_j x_k} with thin SVD, M >= N required."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] < ms.n_modes:
        raise TooFewReceivers(
            f"{points.shape[0]} receivers for {ms.n_modes} guided modes")
    B = mode_traces(ms, points)
    U, s, Vh = np.linalg.svd(B, full_matrices=False)
    V, c = _fix_phases(Vh.conj().T)
    # B = sum_j s_j u_j v_j^dag is invariant under (u_j, v_j) -> (c u_j, c v_j)
    U = U * c[None, :]
    return SensingMatrix(B=B, U=U, s=s, V=V, points=points)


def svd_estimate(p_meas, sm, reg):
    """a_eps = V psi_eps(D) U^dag p from receiver data (FieldSamples or array)."""
    p = p_meas.values if isinstance(p_meas, FieldSamples) else np.asarray(p_meas)
    if p.shape != (sm.B.shape[0],):
        raise GeometryMismatch(f"data length {p.shape} != receiver count {sm.B.shape[0]}")
    return sm.V @ (_apply_filter(reg, sm.s) * (sm.U.conj().T @ p))


# ---------------------------------------------------------------------------
# error analysis

@dataclass
class EstimationReport:
    bias_sq: float
    variance: float
    mse: float
    spectrum: np.ndarray
    a_est: np.ndarray = None


def _as_regularizer(eps):
    return eps if hasattr(eps, "filter") else Tikhonov(float(eps))


def mse_decomposition(op, a_o, sigma, eps):
    """Analytic mean-square estimation error E||a_eps - a_o||^2.

    bias^2 = sum_j (1 - d_j psi(d_j))^2 |(V^dag a_o)_j|^2 in both routes.
    The variance depends on where the noise enters:
      SensingMatrix: per-receiver noise of std sigma gives
        sigma^2 sum_j psi(s_j)^2;
      CouplingMatrix: projection noise with Cov(b) = sigma^2 D gives
        sigma^2 sum_j d_j psi(d_j)^2.  For M discrete receivers with
        per-sample std sigma_s this sigma equals sigma_s/sqrt(M).
    """
    reg = _as_regularizer(eps)
    if isinstance(op, SensingMatrix):
        d, V = op.s, op.V
        var_weights = reg.filter(d) ** 2
    else:
        d, V = op.d, op.V
        var_weights = d * reg.filter(d) ** 2
    coeff = np.abs(V.conj().T @ np.asarray(a_o)) ** 2
    bias_sq = float(np.sum(residual_diagonal(reg, d) ** 2 * coeff))
    variance = float(sigma * sigma * np.sum(var_weights))
    return EstimationReport(bias_sq=bias_sq, variance=variance,
                            mse=bias_sq + variance, spectrum=np.array(d))


def optimal_epsilon(sm, a_o, sigma_meas, grid_points=200):
    """Tikhonov parameter choices for a given noise level.

    Returns (heuristic, scanned): the closed form
    eps = sigma_meas sqrt(N) / ||a_o|| matching the noise-to-signal
    balance of the discrepancy principle, and the argmin of the analytic
    mse over a log grid spanning [1e-12, 1e2] times the top singular value.
    """
    a_o = np.asarray(a_o)
    heuristic = sigma_meas * np.sqrt(a_o.size) / np.linalg.norm(a_o)
    d_max = float(np.max(sm.s if isinstance(sm, SensingMatrix) else sm.d))
    grid = d_max * np.logspace(-12.0, 2.0, grid_points)
    mses = [mse_decomposition(sm, a_o, sigma_meas, e).mse for e in grid]
    return float(heuristic), float(grid[int(np.argmin(mses))])
