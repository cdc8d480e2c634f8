"""Solution-quality and diversity analytics.

Three views of a sampling run: how close the best energy is to a
reference (relative delta energy), which solutions count as elite, and
how the elite solutions spread out in Hamming space (distance matrix,
pair histogram, agglomerative clustering with dendrogram ordering).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, QreadyError, UndefinedRatioError
from .tabu import Sample, SampleSet

DEFAULT_ELITE_TOLERANCE = 1e-6

LINKAGES = ("single", "average", "complete")


def relative_delta_energy(reference: float, candidate: float) -> float:
    """Signed energy gap divided by the reference magnitude (minimization).

    Positive means the candidate beats the reference, zero is a tie.
    """
    if reference == 0.0:
        raise UndefinedRatioError("relative delta energy is undefined for reference 0")
    return (reference - candidate) / abs(reference)


def hamming(a, b) -> int:
    """Number of differing positions between two equal-length bit vectors."""
    av = np.asarray(a)
    bv = np.asarray(b)
    if av.shape != bv.shape:
        raise DimensionError(f"length mismatch: {av.shape} vs {bv.shape}")
    return int(np.count_nonzero(av != bv))


@dataclass
class EliteSet:
    """Samples whose energy sits within tolerance of the best one found."""

    members: list[Sample]
    reference_energy: float
    tolerance: float
    num_variables: int

    def __len__(self) -> int:
        return len(self.members)

    def bit_matrix(self) -> np.ndarray:
        return np.stack([m.bits for m in self.members]).astype(np.uint8)


def elite_filter(s: SampleSet, tolerance: float = DEFAULT_ELITE_TOLERANCE) -> EliteSet:
    """Members within relative tolerance of the best energy.

    The comparison anchors at max(1, |best|) so near-zero references do
    not blow up the ratio.
    """
    if not s.samples:
        raise QreadyError("cannot extract elites from an empty sample set")
    if not (math.isfinite(tolerance) and tolerance > 0):
        raise QreadyError(f"tolerance must be finite and positive, got {tolerance}")
    reference = s.samples[0].energy
    scale = tolerance * max(1.0, abs(reference))
    members = [smp for smp in s.samples if abs(smp.energy - reference) <= scale]
    return EliteSet(
        members=members,
        reference_energy=reference,
        tolerance=tolerance,
        num_variables=s.num_variables,
    )


@dataclass
class DistanceMatrix:
    """Pairwise Hamming distances between elite solutions."""

    matrix: np.ndarray
    num_variables: int

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def normalized(self) -> np.ndarray:
        return self.matrix / self.num_variables

    def to_csv(self) -> str:
        lines = [",".join(str(int(v)) for v in row) for row in self.matrix]
        return "\n".join(lines) + "\n"


def distance_matrix(e: EliteSet) -> DistanceMatrix:
    """All pairwise Hamming distances.

    Uses the identity d(a, b) = |a| + |b| - 2 a.b on the 0/1 matrix, which
    is exact in integer arithmetic.
    """
    if len(e) < 1:
        raise QreadyError("distance matrix needs at least one member")
    bits = e.bit_matrix().astype(np.int64)
    ones = bits.sum(axis=1)
    gram = bits @ bits.T
    d = ones[:, None] + ones[None, :] - 2 * gram
    return DistanceMatrix(matrix=d, num_variables=e.num_variables)


@dataclass
class PairHistogram:
    """Count of unordered solution pairs per Hamming distance."""

    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def descriptive_stats(self) -> dict[str, float]:
        """Mean, variance and skewness of the pair-distance distribution."""
        if not self.counts:
            return {"mean": float("nan"), "variance": float("nan"), "skewness": float("nan")}
        values = np.array(sorted(self.counts), dtype=np.float64)
        weights = np.array([self.counts[int(v)] for v in values], dtype=np.float64)
        total = weights.sum()
        mean = float(np.dot(values, weights) / total)
        var = float(np.dot(weights, (values - mean) ** 2) / total)
        if var == 0.0:
            skew = 0.0
        else:
            skew = float(np.dot(weights, (values - mean) ** 3) / total / var**1.5)
        return {"mean": mean, "variance": var, "skewness": skew}

    def to_csv(self) -> str:
        lines = ["distance,count"]
        for d in sorted(self.counts):
            lines.append(f"{d},{self.counts[d]}")
        return "\n".join(lines) + "\n"


def pair_histogram(m: DistanceMatrix) -> PairHistogram:
    """Histogram over the strict upper triangle of the distance matrix."""
    k = m.size
    iu = np.triu_indices(k, k=1)
    dists = m.matrix[iu]
    counts: dict[int, int] = {}
    for d in dists:
        counts[int(d)] = counts.get(int(d), 0) + 1
    return PairHistogram(counts=counts)


@dataclass(frozen=True)
class Merge:
    """One agglomeration step: clusters a and b joined at the given height."""

    cluster_a: int
    cluster_b: int
    height: float
    new_size: int


@dataclass
class Dendrogram:
    """Agglomerative merge history plus the left-to-right leaf traversal."""

    merges: list[Merge]
    leaf_order: list[int]
    linkage: str

    @property
    def num_leaves(self) -> int:
        return len(self.leaf_order)

    def heights(self) -> list[float]:
        return [m.height for m in self.merges]

    def to_dict(self) -> dict:
        return {
            "linkage": self.linkage,
            "merges": [[m.cluster_a, m.cluster_b, m.height, m.new_size] for m in self.merges],
            "leaf_order": list(self.leaf_order),
        }


def hierarchical_cluster(m: DistanceMatrix, linkage: str = "average") -> Dendrogram:
    """Naive agglomerative clustering with deterministic tie-breaking.

    Leaves are clusters 0..k-1; merge t creates cluster k+t.  At every
    step the pair of clusters with minimal linkage distance is joined,
    ties broken by the smallest (cluster_a, cluster_b) pair.  Exact
    O(k^3), which is fine at the 700-sample pool cap.
    """
    if linkage not in LINKAGES:
        raise QreadyError(f"linkage must be one of {LINKAGES}, got {linkage!r}")
    k = m.size
    if k == 1:
        return Dendrogram(merges=[], leaf_order=[0], linkage=linkage)

    # Working copy indexed by "slot"; slots stay sorted by cluster id, so a
    # row-major argmin lands on the tie-break-smallest (a, b) pair.
    dist = m.matrix.astype(np.float64).copy()
    np.fill_diagonal(dist, np.inf)
    ids = list(range(k))
    sizes = {i: 1 for i in range(k)}
    children: dict[int, tuple[int, int]] = {}
    merges: list[Merge] = []

    for step in range(k - 1):
        mcount = len(ids)
        tri = np.triu(np.full((mcount, mcount), True), k=1)
        flat = np.where(tri, dist, np.inf).argmin()
        ra, rb = divmod(int(flat), mcount)
        height = float(dist[ra, rb])
        a, b = ids[ra], ids[rb]
        na, nb = sizes[a], sizes[b]
        new_id = k + step
        merges.append(Merge(cluster_a=a, cluster_b=b, height=height, new_size=na + nb))
        children[new_id] = (a, b)
        sizes[new_id] = na + nb

        row_a = dist[ra]
        row_b = dist[rb]
        if linkage == "single":
            new_row = np.minimum(row_a, row_b)
        elif linkage == "complete":
            new_row = np.maximum(row_a, row_b)
        else:
            new_row = (na * row_a + nb * row_b) / (na + nb)
        keep = [s for s in range(mcount) if s not in (ra, rb)]
        new_row = new_row[keep]
        dist = dist[np.ix_(keep, keep)]
        dist = np.pad(dist, ((0, 1), (0, 1)), constant_values=np.inf)
        dist[-1, :-1] = new_row
        dist[:-1, -1] = new_row
        ids = [ids[s] for s in keep] + [new_id]

    root = k + (k - 2)
    leaf_order: list[int] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if node < k:
            leaf_order.append(node)
        else:
            a, b = children[node]
            stack.append(b)
            stack.append(a)
    return Dendrogram(merges=merges, leaf_order=leaf_order, linkage=linkage)


@dataclass
class DiversityReport:
    """Bundle of the per-run diversity artifacts."""

    elite: EliteSet
    distances: DistanceMatrix
    histogram: PairHistogram
    dendrogram: Dendrogram

    def to_dict(self) -> dict:
        return {
            "elite_count": len(self.elite),
            "reference_energy": self.elite.reference_energy,
            "tolerance": self.elite.tolerance,
            "histogram": {str(d): c for d, c in sorted(self.histogram.counts.items())},
            "histogram_stats": self.histogram.descriptive_stats(),
            "dendrogram": self.dendrogram.to_dict(),
        }


def diversity_report(
    s: SampleSet,
    tolerance: float = DEFAULT_ELITE_TOLERANCE,
    linkage: str = "average",
) -> DiversityReport:
    elite = elite_filter(s, tolerance)
    dm = distance_matrix(elite)
    return DiversityReport(
        elite=elite,
        distances=dm,
        histogram=pair_histogram(dm),
        dendrogram=hierarchical_cluster(dm, linkage),
    )
