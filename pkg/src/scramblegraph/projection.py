"""Classical (Torgerson) 2-D multidimensional scaling and scatter export.

The squared-distance matrix is double-centered and its two leading
eigenpairs are extracted by power iteration with Gram-Schmidt deflation,
followed by a closed-form 2x2 Rayleigh-Ritz rotation of the converged
subspace, which makes the result exact for distance matrices of true
planar configurations regardless of the eigenvalue gap.  Coordinates for
non-positive eigenvalues clamp to zero.  Each axis is sign-fixed so that
its largest-magnitude coordinate is positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cluster import DistanceMatrix
from .errors import InputError

__all__ = [
    "Projection2D",
    "classical_mds",
    "export_scatter",
    "projection_csv",
    "DEFAULT_PALETTE",
    "SINGLETON_COLOR",
]

_TOL = 1e-10
_MAX_ITER = 10_000

# Cluster colors in decreasing size order; singletons use a fixed color.
DEFAULT_PALETTE = ("red", "green", "darkorange", "purple", "teal", "saddlebrown", "magenta", "olive")
SINGLETON_COLOR = "blue"


@dataclass(frozen=True)
class Projection2D:
    coordinates: tuple[tuple[float, float], ...]
    stress: float


def classical_mds(dist: DistanceMatrix | np.ndarray) -> Projection2D:
    """Project a distance matrix to the plane spanned by its top two axes."""
    if not isinstance(dist, DistanceMatrix):
        dist = DistanceMatrix.from_values(dist)
    d = dist.values
    n = dist.size
    if n == 1:
        return Projection2D(coordinates=((0.0, 0.0),), stress=0.0)

    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * centering @ (d * d) @ centering

    val1, vec1 = _power_iteration(b, deflated=[])
    val2, vec2 = _power_iteration(b, deflated=[vec1])

    # Rayleigh-Ritz on the converged 2-dimensional invariant subspace.
    basis = np.stack([vec1, vec2], axis=1)
    small = basis.T @ b @ basis
    eigvals, eigvecs = _symmetric_2x2_eig(small)
    rotated = basis @ eigvecs

    coords = np.zeros((n, 2))
    for axis in range(2):
        if eigvals[axis] > 0:
            coords[:, axis] = rotated[:, axis] * np.sqrt(eigvals[axis])
    coords -= coords.mean(axis=0)
    for axis in range(2):
        peak = int(np.argmax(np.abs(coords[:, axis])))
        if coords[peak, axis] < 0:
            coords[:, axis] = -coords[:, axis]

    diff = coords[:, None, :] - coords[None, :, :]
    embedded = np.sqrt((diff * diff).sum(axis=-1))
    upper = np.triu_indices(n, k=1)
    denom = float((d[upper] ** 2).sum())
    stress = float(((embedded[upper] - d[upper]) ** 2).sum()) / denom if denom > 0 else 0.0

    return Projection2D(coordinates=tuple((float(x), float(y)) for x, y in coords), stress=stress)


def _power_iteration(matrix: np.ndarray, deflated: list[np.ndarray]):
    """Leading eigenpair of the subspace orthogonal to ``deflated``."""
    n = matrix.shape[0]
    # below this, the deflated operator is numerically zero and iterating
    # would only amplify roundoff noise back toward the deflated directions
    floor = 1e-13 * float(np.linalg.norm(matrix))
    vec = None
    for j in range(n):
        start = -np.full(n, 1.0 / n)
        start[j] += 1.0  # centered basis vector; never parallel to the ones vector
        for other in deflated:
            start -= (start @ other) * other
        norm = np.linalg.norm(start)
        if norm > 1e-12:
            vec = start / norm
            break
    if vec is None:
        return 0.0, np.zeros(n)

    for _ in range(_MAX_ITER):
        nxt = matrix @ vec
        for other in deflated:
            nxt -= (nxt @ other) * other
        norm = np.linalg.norm(nxt)
        if norm <= floor:
            return 0.0, vec
        nxt /= norm
        if min(np.linalg.norm(nxt - vec), np.linalg.norm(nxt + vec)) < _TOL:
            vec = nxt
            break
        vec = nxt
    value = float(vec @ matrix @ vec)
    return value, vec


def _symmetric_2x2_eig(m: np.ndarray):
    """Eigenpairs of a symmetric 2x2 matrix, eigenvalues descending.

    Uses the half-angle rotation, which stays accurate when the matrix is
    nearly diagonal (the textbook ``[b, lambda - a]`` form cancels there).
    """
    a, b, c = m[0, 0], m[0, 1], m[1, 1]
    trace_half = (a + c) / 2.0
    radius = np.sqrt(((a - c) / 2.0) ** 2 + b * b)
    theta = 0.5 * np.arctan2(2.0 * b, a - c)
    v1 = np.array([np.cos(theta), np.sin(theta)])
    v2 = np.array([-v1[1], v1[0]])
    return np.array([trace_half + radius, trace_half - radius]), np.stack([v1, v2], axis=1)


def export_scatter(
    proj: Projection2D,
    clusters: Sequence[Sequence[int]],
    palette: Sequence[str] = DEFAULT_PALETTE,
    point_titles: Sequence[str] | None = None,
    size: int = 800,
) -> str:
    """Deterministic SVG scatter colored by cluster size rank."""
    n = len(proj.coordinates)
    covered = sorted(i for c in clusters for i in c)
    if covered != list(range(n)):
        raise InputError("cluster partition must cover every projected point exactly once")

    color_of = _cluster_colors(clusters, palette)

    margin = 40
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">'
    ]
    if n:
        xs = [p[0] for p in proj.coordinates]
        ys = [p[1] for p in proj.coordinates]
        span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
        scale = (size - 2 * margin) / span

        for i, (x, y) in enumerate(proj.coordinates):
            cx = margin + (x - min(xs)) * scale
            cy = size - margin - (y - min(ys)) * scale
            title = point_titles[i] if point_titles else f"point {i}"
            lines.append(
                f'  <circle cx="{cx:.4f}" cy="{cy:.4f}" r="5" fill="{color_of[i]}">'
                f"<title>{title}</title></circle>"
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _cluster_colors(clusters: Sequence[Sequence[int]], palette: Sequence[str]) -> dict[int, str]:
    ordered = sorted((tuple(sorted(c)) for c in clusters), key=lambda c: (-len(c), c))
    color_of: dict[int, str] = {}
    rank = 0
    for members in ordered:
        if len(members) == 1:
            color = SINGLETON_COLOR
        else:
            color = palette[rank % len(palette)]
            rank += 1
        for i in members:
            color_of[i] = color
    return color_of


def projection_csv(
    proj: Projection2D,
    clusters: Sequence[Sequence[int]],
    multiplicities: Sequence[int],
    sources: Sequence[Sequence[str]],
) -> str:
    ordered = sorted((tuple(sorted(c)) for c in clusters), key=lambda c: (-len(c), c))
    cluster_of = {i: rank + 1 for rank, members in enumerate(ordered) for i in members}
    rows = ["point_index,x,y,cluster,multiplicity,sources"]
    for i, (x, y) in enumerate(proj.coordinates):
        rows.append(
            f"{i},{repr(x)},{repr(y)},{cluster_of[i]},{multiplicities[i]},{';'.join(sources[i])}"
        )
    return "\n".join(rows) + "\n"
