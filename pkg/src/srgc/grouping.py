"""Coarsened super-ray grouping: pairwise coefficient MSE, histogram
threshold, 1-level groups, transitive merge, main selection, prediction.

The grouping walk:

1. Every pair of coarsened coefficient vectors gets an MSE weight
   (mean over the common dimension).
2. A fixed-width histogram of the weights picks the threshold: the upper
   edge of the lowest bin attaining the maximum pair count.
3. Each index i forms a 1-level set {i} u {j : mse(i,j) <= threshold};
   singletons are discarded.
4. Intersecting 1-level sets merge transitively into final groups
   (connected components of the overlap relation).
5. Each group's main member is the one nearest (L2) to the elementwise
   lower-median signal, ties to the smallest index.

Grouped members are later reconstructed through the main member's
eigenbasis; the integer residual against the rounded cross-basis
prediction makes that reconstruction exact.
"""

from dataclasses import dataclass

import numpy as np

from .transform import predict_signal
from .util import round_half_away


@dataclass
class PairWeights:
    """Condensed upper-triangle MSE weights over C(m, 2) index pairs."""

    m: int
    condensed: np.ndarray

    @property
    def count(self):
        return self.m * (self.m - 1) // 2

    def index(self, i, j):
        if i == j:
            raise KeyError("no self-pair weight")
        if i > j:
            i, j = j, i
        return i * self.m - i * (i + 1) // 2 + (j - i - 1)

    def __getitem__(self, pair):
        return float(self.condensed[self.index(*pair)])

    def pairs(self):
        for i in range(self.m):
            for j in range(i + 1, self.m):
                yield (i, j), float(self.condensed[self.index(i, j)])


@dataclass
class SuperRayGroup:
    members: tuple
    main_index: int


@dataclass
class GroupSet:
    groups: list
    ungrouped: tuple
    mse_threshold: float

    @property
    def grouped_count(self):
        return sum(len(g.members) for g in self.groups)


def pairwise_mse(coeff_vectors) -> PairWeights:
    """MSE between every pair of equal-length coefficient vectors."""
    arrays = [np.asarray(getattr(c, "coeffs", c), dtype=np.float64) for c in coeff_vectors]
    m = len(arrays)
    if m == 0:
        return PairWeights(m=0, condensed=np.zeros(0))
    n = arrays[0].size
    for a in arrays:
        if a.size != n:
            raise ValueError(
                "coefficient vectors must share one dimension "
                f"(got {a.size} vs {n}); coarsening contract violated"
            )
    x = np.stack(arrays)
    out = np.empty(m * (m - 1) // 2, dtype=np.float64)
    pos = 0
    for i in range(m - 1):
        d = x[i + 1 :] - x[i]
        out[pos : pos + m - 1 - i] = (d * d).mean(axis=1)
        pos += m - 1 - i
    return PairWeights(m=m, condensed=out)


def select_threshold(pw: PairWeights, bin_width) -> float:
    """Histogram rule: fixed bins [k*w, (k+1)*w); the threshold is the
    upper edge of the lowest-index bin with the maximum pair count."""
    if bin_width <= 0:
        raise ValueError("bin width must be positive")
    if pw.count == 0:
        raise ValueError("threshold needs at least one pair")
    bins = np.floor(pw.condensed / bin_width).astype(np.int64)
    occupied, counts = np.unique(bins, return_counts=True)
    best = int(occupied[counts == counts.max()].min())  # lowest bin wins ties
    return float((best + 1) * bin_width)


def one_level_groups(pw: PairWeights, threshold) -> list:
    """Per-index similarity sets {i} u {j : mse(i,j) <= threshold};
    singletons dropped."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    sets = []
    for i in range(pw.m):
        members = {i}
        for j in range(pw.m):
            if j != i and pw.condensed[pw.index(i, j)] <= threshold:
                members.add(j)
        if len(members) >= 2:
            sets.append(tuple(sorted(members)))
    return sets


def merge_groups(subs) -> list:
    """Union intersecting sets transitively (connected components of the
    overlap relation); output ordered by smallest member."""
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s in subs:
        it = iter(s)
        first = next(it, None)
        if first is None:
            continue
        parent.setdefault(first, first)
        ra = find(first)
        for b in it:
            parent.setdefault(b, b)
            rb = find(b)
            if ra != rb:
                if rb < ra:
                    ra, rb = rb, ra
                parent[rb] = ra
    components = {}
    for a in parent:
        components.setdefault(find(a), set()).add(a)
    return [tuple(sorted(c)) for c in sorted(components.values(), key=min)]


def select_main(group, signals) -> int:
    """Member whose signal is L2-nearest to the elementwise lower median of
    the group's signals; ties to the smallest index."""
    members = sorted(group)
    if len(members) < 2:
        raise ValueError("main selection needs at least 2 members")
    stack = np.stack([np.asarray(signals[i], dtype=np.float64) for i in members])
    srt = np.sort(stack, axis=0)
    median = srt[(len(members) - 1) // 2]
    dists = np.linalg.norm(stack - median, axis=1)
    return members[int(np.argmin(dists))]  # argmin: first (smallest index) wins


def predict_and_residual(main_basis, member_coeffs, member_signal, sample_max):
    """Cross-basis prediction and its exact integer residual.

    predicted = clamp(round(U_main @ coeffs)); residual = signal - predicted.
    """
    coeffs = np.asarray(getattr(member_coeffs, "coeffs", member_coeffs), dtype=np.float64)
    signal = np.asarray(member_signal)
    n = main_basis.vectors.shape[0]
    if coeffs.shape != (n,) or signal.shape != (n,):
        raise ValueError("prediction dimension mismatch")
    predicted = predict_signal(main_basis, coeffs, sample_max)
    residual = np.asarray(round_half_away(signal.astype(np.float64)), dtype=np.int64) - predicted
    return predicted, residual


def derive_group_members(coeffs, bin_width=5.0):
    """Membership half of the grouping pass: (merged member sets, threshold).

    Depends only on the coefficient vectors, so an encoder and a decoder
    holding identical dequantized coefficients derive identical sets.
    """
    m = len(coeffs)
    if m < 2:
        return [], 0.0
    pw = pairwise_mse(coeffs)
    threshold = select_threshold(pw, bin_width)
    return merge_groups(one_level_groups(pw, threshold)), threshold


def run_grouping(coeffs, signals, bin_width=5.0) -> GroupSet:
    """Full grouping pass over coarsened coefficient vectors.

    ``coeffs`` and ``signals`` are parallel sequences indexed 0..m-1.
    With fewer than 2 vectors no groups form.
    """
    m = len(coeffs)
    merged, threshold = derive_group_members(coeffs, bin_width)
    groups = [
        SuperRayGroup(members=members, main_index=select_main(members, signals))
        for members in merged
    ]
    grouped = set()
    for g in groups:
        grouped.update(g.members)
    ungrouped = tuple(i for i in range(m) if i not in grouped)
    return GroupSet(groups=groups, ungrouped=ungrouped, mse_threshold=threshold)
