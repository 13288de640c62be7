"""SLIC super-pixel segmentation and disparity-based label projection.

The reference (top-left) view is over-segmented into super-pixels; each
super-pixel gets the median disparity of its pixels, and the labels are
projected to every other view by that disparity.  A super-ray is the set of
corresponding per-view pixel regions sharing one label; it is the unit the
codec transforms.

All operations here are deterministic: ties in the SLIC assignment go to
the earlier seed, projection conflicts go to the larger disparity (nearer
surface) then the smaller label, and holes are filled by iterated majority
vote of labeled 4-neighbors with ties to the smallest label.  Projection
shifts are rounded once per label (round-half-away-from-zero on d*t, d*s),
so a view's label map is a pure function of the reference map and the
disparities.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import OrphanLabelError, TooManySuperpixelsError
from .util import lower_median, quantize_eighth, round_half_away

_FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass
class SegmentationMap:
    """Per-view label arrays; ``labels[0]`` is the reference view."""

    labels: list
    label_count: int

    @property
    def reference(self):
        return self.labels[0]


@dataclass
class SuperRay:
    """One label's pixel lists across all views.

    ``per_view_pixels[v]`` is an (N_v, 2) int array of (y, x) coordinates in
    raster order; view index v = s * T + t.  The reference list (v = 0) is
    never empty.  ``disparity`` is the 1/8-px quantized median disparity of
    the reference super-pixel.
    """

    label: int
    per_view_pixels: list
    disparity: float

    @property
    def total_pixels(self):
        return int(sum(p.shape[0] for p in self.per_view_pixels))


# ---------------------------------------------------------------------------
# SLIC
# ---------------------------------------------------------------------------

def _seed_grid(w, h, k):
    ny = max(1, int(round(np.sqrt(k * h / w))))
    nx = max(1, int(round(k / ny)))
    xs = (np.arange(nx) + 0.5) * w / nx
    ys = (np.arange(ny) + 0.5) * h / ny
    seeds = [(float(y), float(x)) for y in ys for x in xs]
    return seeds, w / nx, h / ny


def _perturb_seeds(image, seeds):
    """Move each seed to the lowest-gradient pixel in its 3x3 window
    (center-first tie order keeps constant images on the grid)."""
    h, w = image.shape
    gy, gx = np.gradient(image.astype(np.float64))
    grad = gy * gy + gx * gx
    offsets = sorted(
        ((dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1)),
        key=lambda o: (o[0] * o[0] + o[1] * o[1], o[0], o[1]),
    )
    out = []
    for sy, sx in seeds:
        cy, cx = int(sy), int(sx)
        best = None
        for dy, dx in offsets:
            y, x = cy + dy, cx + dx
            if 0 <= y < h and 0 <= x < w:
                if best is None or grad[y, x] < best[0]:
                    best = (grad[y, x], y, x)
        out.append((float(best[1]), float(best[2])))
    return out


def _enforce_connectivity(labels, w, h, k):
    """Split labels into 4-connected components and merge fragments smaller
    than 25% of the mean region size (W*H/k) into their largest 4-neighbor."""
    comp = np.full(labels.shape, -1, dtype=np.int64)
    next_id = 0
    for lbl in range(int(labels.max()) + 1):
        mask = labels == lbl
        if not mask.any():
            continue
        cc, n = ndimage.label(mask, structure=_FOUR_CONN)
        for i in range(1, n + 1):
            comp[cc == i] = next_id
            next_id += 1
    sizes = np.bincount(comp.ravel(), minlength=next_id).astype(np.int64)
    threshold = 0.25 * (w * h) / k
    small = sorted(
        (i for i in range(next_id) if sizes[i] < threshold),
        key=lambda i: (sizes[i], i),
    )
    for frag in small:
        mask = comp == frag
        if not mask.any():
            continue
        ring = ndimage.binary_dilation(mask, structure=_FOUR_CONN) & ~mask
        neigh = comp[ring]
        neigh = neigh[neigh >= 0]
        if neigh.size == 0:
            continue
        counts = np.bincount(neigh, minlength=next_id)
        # largest adjacent region by current size; ties to smaller id
        candidates = np.flatnonzero(counts)
        target = int(candidates[np.lexsort((candidates, -sizes[candidates]))[0]])
        comp[mask] = target
        sizes[target] += sizes[frag]
        sizes[frag] = 0
    # compact ids in raster first-appearance order
    order = {}
    flat = comp.ravel()
    remap = np.full(next_id, -1, dtype=np.int64)
    for v in flat:
        if remap[v] < 0:
            remap[v] = len(order)
            order[v] = True
    return remap[comp], len(order)


def slic_segment(image, k, compactness=10.0, iterations=10):
    """Segment a 2D luma image (or a View) into approximately k super-pixels.

    Standard SLIC with grid seeding, gradient-based seed perturbation and a
    connectivity post-pass; the distance is D^2 = d_int^2 + m^2 * d_xy^2/S^2
    with S = sqrt(W*H/k).  Returns a reference-view-only SegmentationMap.
    """
    if hasattr(image, "planes"):
        planes = image.planes
        if len(planes) == 1:
            image = planes[0]
        else:
            r, g, b = (p.astype(np.float64) for p in planes)
            image = 0.2126 * r + 0.7152 * g + 0.0722 * b
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("slic_segment expects a 2D image")
    h, w = image.shape
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > w * h:
        raise TooManySuperpixelsError(f"too many superpixels: k={k} > {w * h} pixels")
    if compactness <= 0:
        raise ValueError("compactness must be positive")

    seeds, step_x, step_y = _seed_grid(w, h, k)
    seeds = _perturb_seeds(image, seeds)
    img = image.astype(np.float64)
    centers = np.array([[sy, sx, img[int(sy), int(sx)]] for sy, sx in seeds])
    s_norm = np.sqrt(w * h / len(seeds))
    m2 = compactness * compactness
    half_x = int(np.ceil(1.5 * step_x)) + 1
    half_y = int(np.ceil(1.5 * step_y)) + 1

    labels = np.zeros((h, w), dtype=np.int64)
    for _ in range(iterations):
        dist = np.full((h, w), np.inf)
        labels.fill(-1)
        for ci in range(len(centers)):
            cy, cx, cv = centers[ci]
            y0, y1 = max(0, int(cy) - half_y), min(h, int(cy) + half_y + 1)
            x0, x1 = max(0, int(cx) - half_x), min(w, int(cx) + half_x + 1)
            ys, xs = np.mgrid[y0:y1, x0:x1]
            d = (img[y0:y1, x0:x1] - cv) ** 2 + m2 * (
                (ys - cy) ** 2 + (xs - cx) ** 2
            ) / (s_norm * s_norm)
            sub = dist[y0:y1, x0:x1]
            better = d < sub
            sub[better] = d[better]
            labels[y0:y1, x0:x1][better] = ci
        # pixels outside every window: nearest seed spatially
        missing = labels < 0
        if missing.any():
            ys, xs = np.nonzero(missing)
            d2 = (ys[:, None] - centers[:, 0]) ** 2 + (xs[:, None] - centers[:, 1]) ** 2
            labels[ys, xs] = np.argmin(d2, axis=1)
        for ci in range(len(centers)):
            mask = labels == ci
            if mask.any():
                ys, xs = np.nonzero(mask)
                centers[ci] = (ys.mean(), xs.mean(), img[ys, xs].mean())

    labels, count = _enforce_connectivity(labels, w, h, len(seeds))
    return SegmentationMap(labels=[labels], label_count=count)


# ---------------------------------------------------------------------------
# Disparity and projection
# ---------------------------------------------------------------------------

def median_disparity(region, dmap):
    """Lower median of the disparity values over a pixel region.

    ``region`` is an (N, 2) array of (y, x) coordinates inside the map.
    """
    region = np.asarray(region)
    if region.size == 0:
        raise ValueError("median disparity of empty region")
    vals = dmap.values[region[:, 0], region[:, 1]]
    return lower_median(vals)


def label_shift(disparity, s, t):
    """Integer (dy, dx) shift of a label's pixels in view (s, t)."""
    return round_half_away(disparity * s), round_half_away(disparity * t)


def project_labels(ref_map, disparities, angular_dims):
    """Project reference-view labels to every view of the angular grid.

    For view (s, t) every reference pixel of label l lands at
    (x - round(d_l * t), y - round(d_l * s)).  Conflicts: the larger
    disparity wins, ties to the smaller label.  Unlabeled target pixels are
    filled by iterated majority vote over labeled 4-neighbors (ties to the
    smallest label); a view left entirely unlabeled falls back to the
    reference map.
    """
    ref = ref_map.reference
    count = ref_map.label_count
    missing = [l for l in range(count) if l not in disparities]
    if missing:
        raise ValueError(f"labels without disparity: {missing}")
    h, w = ref.shape
    s_count, t_count = angular_dims
    # scatter order: ascending disparity, then descending label, so the
    # last write is the largest disparity / smallest label
    order = sorted(range(count), key=lambda l: (disparities[l], -l))
    regions = [np.nonzero(ref == l) for l in range(count)]
    out = []
    for s in range(s_count):
        for t in range(t_count):
            if s == 0 and t == 0:
                out.append(ref.copy())
                continue
            view = np.full((h, w), -1, dtype=np.int64)
            for l in order:
                dy, dx = label_shift(disparities[l], s, t)
                ys, xs = regions[l]
                ty, tx = ys - dy, xs - dx
                ok = (ty >= 0) & (ty < h) & (tx >= 0) & (tx < w)
                view[ty[ok], tx[ok]] = l
            _fill_holes(view, ref)
            out.append(view)
    return SegmentationMap(labels=out, label_count=count)


def _fill_holes(view, fallback):
    """In-place majority-of-4-neighbors fill of -1 entries, one synchronous
    round at a time; stalls (fully unlabeled view) fall back to `fallback`."""
    if not (view == -1).any():
        return
    if (view == -1).all():
        view[:] = fallback
        return
    h, w = view.shape
    while True:
        holes = np.argwhere(view == -1)
        if holes.size == 0:
            return
        assignments = []
        for y, x in holes:
            counts = {}
            for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                if 0 <= ny < h and 0 <= nx < w and view[ny, nx] >= 0:
                    lbl = int(view[ny, nx])
                    counts[lbl] = counts.get(lbl, 0) + 1
            if counts:
                best = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
                assignments.append((y, x, best))
        if not assignments:
            # unreachable enclave: copy from the reference map
            mask = view == -1
            view[mask] = fallback[mask]
            return
        for y, x, lbl in assignments:
            view[y, x] = lbl


# ---------------------------------------------------------------------------
# Super-ray assembly
# ---------------------------------------------------------------------------

def assemble_super_rays(seg, disparities):
    """Build SuperRays from an all-view segmentation and known per-label
    disparities (the decoder-side path)."""
    count = seg.label_count
    rays = []
    per_label = [[] for _ in range(count)]
    for view_labels in seg.labels:
        for l in range(count):
            ys, xs = np.nonzero(view_labels == l)
            per_label[l].append(np.column_stack([ys, xs]).astype(np.int64))
    for l in range(count):
        if per_label[l][0].shape[0] == 0:
            raise OrphanLabelError(f"orphan label {l}: absent from reference view")
        rays.append(
            SuperRay(label=l, per_view_pixels=per_label[l], disparity=disparities[l])
        )
    return rays


def build_super_rays(seg, dmap):
    """One SuperRay per label with the median reference disparity
    (quantized to 1/8 px, the transmission precision)."""
    count = seg.label_count
    ref = seg.reference
    disparities = {}
    for l in range(count):
        region = np.argwhere(ref == l)
        if region.shape[0] == 0:
            raise OrphanLabelError(f"orphan label {l}: absent from reference view")
        disparities[l] = quantize_eighth(median_disparity(region, dmap))
    return assemble_super_rays(seg, disparities)
