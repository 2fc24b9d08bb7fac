"""Point-source data synthesis on antenna arrays.

An array geometry carries a uniform unit-mass measure mu; dense
apertures are represented by composite Gauss-Legendre samples of that
measure so that every array integral in the package is a plain weighted
sum. Field synthesis is the guided-mode sum, and measurement noise is
additive circular complex Gaussian scaled relative to the peak data
amplitude.
"""

from dataclasses import dataclass

import numpy as np

NODES_PER_WAVELENGTH = 64


@dataclass(frozen=True)
class PointSource:
    x_o: float
    z_o: float


@dataclass(frozen=True, eq=False)
class Discrete:
    """Finite receiver set; mu puts weight 1/M on each point."""

    points: np.ndarray  # (M, 2) columns x, z

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_2d(np.asarray(self.points, dtype=float)))


@dataclass(frozen=True)
class DenseVertical:
    """Vertical segments {0} x [b_k - a_k, b_k + a_k]; default one segment
    of half-length a centered at z_a."""

    z_a: float
    a: float
    intervals: tuple = None

    def segments(self):
        if self.intervals is not None:
            return tuple((float(b), float(h)) for b, h in self.intervals)
        return ((self.z_a, self.a),)


@dataclass(frozen=True)
class DenseHorizontal:
    """Horizontal segments [b_k - a_k, b_k + a_k] x {z_a}; default segment
    [0, 2a] as in the dense-aperture analysis."""

    z_a: float
    a: float
    intervals: tuple = None

    def segments(self):
        if self.intervals is not None:
            return tuple((float(b), float(h)) for b, h in self.intervals)
        return ((self.a, self.a),)


@dataclass(frozen=True)
class DensePlanar:
    """Square aperture [-a, a] x [z_a - a, z_a + a] with uniform measure."""

    z_a: float
    a: float


@dataclass
class FieldSamples:
    """Complex field values on an array's sample points.

    For Discrete geometries the samples are the receivers themselves;
    for dense geometries they are the quadrature nodes of mu at the
    stated resolution. weights always sum to 1.
    """

    geometry: object
    points: np.ndarray   # (K, 2)
    weights: np.ndarray  # (K,)
    values: np.ndarray   # (K,) complex


@dataclass(frozen=True)
class NoiseModel:
    sigma_rel: float
    seed: int = 0

    def sigma_meas(self, p):
        """Absolute per-sample noise level sigma_rel * ||p||_inf."""
        return self.sigma_rel * np.max(np.abs(p))


def geometry_equal(g1, g2):
    if type(g1) is not type(g2):
        return False
    if isinstance(g1, Discrete):
        return g1.points.shape == g2.points.shape and np.array_equal(g1.points, g2.points)
    return g1 == g2


def _segment_nodes(segments, lambda_o):
    """Composite Gauss-Legendre nodes/weights over a union of segments,
    normalized to total mass 1 (weights proportional to segment length)."""
    total = sum(h for _, h in segments)
    coords, weights = [], []
    for b, h in segments:
        n = max(16, int(np.ceil(NODES_PER_WAVELENGTH * 2.0 * h / lambda_o)))
        x, w = np.polynomial.legendre.leggauss(n)
        coords.append(b + h * x)
        weights.append(0.5 * h * w / total)  # (1/(2 total)) * dz over this segment
    return np.concatenate(coords), np.concatenate(weights)


def array_samples(geom, lambda_o, refine=1):
    """Sample points (K, 2) and unit-mass weights (K,) of mu.

    refine multiplies the per-wavelength node budget of dense
    geometries; it is what the coupling-matrix quadrature fallback
    adjusts when checking convergence.
    """
    if isinstance(geom, Discrete):
        m = geom.points.shape[0]
        return geom.points, np.full(m, 1.0 / m)
    lam = lambda_o / refine
    if isinstance(geom, DenseVertical):
        z, w = _segment_nodes(geom.segments(), lam)
        return np.column_stack([np.zeros_like(z), z]), w
    if isinstance(geom, DenseHorizontal):
        x, w = _segment_nodes(geom.segments(), lam)
        return np.column_stack([x, np.full_like(x, geom.z_a)]), w
    if isinstance(geom, DensePlanar):
        x, wx = _segment_nodes(((0.0, geom.a),), lam)
        z, wz = _segment_nodes(((geom.z_a, geom.a),), lam)
        xx, zz = np.meshgrid(x, z, indexing="ij")
        ww = np.outer(wx, wz)
        return np.column_stack([xx.ravel(), zz.ravel()]), ww.ravel()
    raise TypeError(f"unknown geometry {type(geom).__name__}")


def source_amplitudes(ms, src):
    """Guided-mode amplitudes a_{j,o} = (i / (2 beta_j)) phi_j(z_o) e^{i beta_j x_o}."""
    prof = ms.profile_matrix(src.z_o)[0]
    return 1j / (2.0 * ms.beta) * prof * np.exp(1j * ms.beta * src.x_o)


def mode_traces(ms, points):
    """Matrix of mode traces phi_j(z_k) e^{-i beta_j x_k}, shape (K, n_modes)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    prof = ms.profile_matrix(points[:, 1])
    return prof * np.exp(-1j * np.outer(points[:, 0], ms.beta))


def sample_field(ms, amps, geom):
    """Record the mode-sum field p = sum_j a_j phi_j(z) e^{-i beta_j x} on geom."""
    pts, w = array_samples(geom, ms.lambda_o)
    values = mode_traces(ms, pts) @ np.asarray(amps, dtype=complex)
    return FieldSamples(geom, pts, w, values)


def add_noise(fs, nm):
    """Add i.i.d. circular complex Gaussian noise of per-sample variance
    sigma_meas^2 = (sigma_rel ||p||_inf)^2; deterministic for a fixed seed."""
    s_meas = nm.sigma_meas(fs.values)
    rng = np.random.Generator(np.random.Philox(nm.seed))
    k = fs.values.size
    w = s_meas / np.sqrt(2.0) * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return FieldSamples(fs.geometry, fs.points, fs.weights, fs.values + w)


def lhs_design(M, center, size, seed):
    """Latin hypercube of M points in the square [center -+ size]^2.

    Each axis is split into M equal bins with exactly one point per bin;
    positions within a bin are uniform (random-within-bin variant).
    size is the half-width of the square.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    pts = np.empty((M, 2))
    for ax, c in enumerate(center):
        perm = rng.permutation(M)
        u = rng.uniform(size=M)
        pts[:, ax] = c - size + (perm + u) * (2.0 * size / M)
    return pts


def vertical_line(M, z_a=11.0, extent=0.25):
    """Receiver depths z_k = z_a + extent (k - M/2)/M, k = 1..M, at x = 0.

    The formula is kept verbatim from the reference configuration; its
    center sits half a spacing above z_a.
    """
    k = np.arange(1, M + 1)
    z = z_a + extent * (k - M / 2.0) / M
    return np.column_stack([np.zeros(M), z])


def horizontal_line(M, z_a=11.0, extent=0.25):
    """Receiver ranges x_k = extent (k - M/2)/M, k = 1..M, at depth z_a."""
    k = np.arange(1, M + 1)
    x = extent * (k - M / 2.0) / M
    return np.column_stack([x, np.full(M, z_a)])
