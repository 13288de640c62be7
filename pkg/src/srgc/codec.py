"""Encoder and decoder pipelines.

Encoder: SLIC on the reference view -> per-label median disparity ->
label projection -> super-rays -> coarsen (q_gft >= q_switch) or partition
(otherwise) -> eigendecompose every coding unit -> GFT -> quantize ->
group coarsened units on dequantized coefficients -> select main members
-> cross-basis prediction and integer residuals -> entropy-coded sections.

Decoder: rebuilds segmentation, projection, units, coarsening and groups
from transmitted data (labels, disparities, structure flags, split trees,
dequantized coefficients), reads each group's main index from the stream,
and eigendecomposes only ungrouped units plus one main per group.  Grouped
members are reconstructed as rounded cross-basis prediction plus residual,
which with raw residuals reproduces the coded unit signal exactly.

Everything outside wall-clock timings is a deterministic function of
(light field, disparity map, config): canonical orderings throughout, and
worker pools only ever map pure functions whose results are collected in
unit order.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bitstream as bs
from .bitstream import Bitstream, StreamHeader
from .entropy import entropy_decode, entropy_encode
from .errors import CorruptStreamError, EmptyLightFieldError, SrgcError
from .grouping import (
    GroupSet,
    SuperRayGroup,
    derive_group_members,
    predict_and_residual,
    select_main,
)
from .lightfield import DisparityMap, LightField, View, _sample_dtype
from .segmentation import (
    SegmentationMap,
    assemble_super_rays,
    median_disparity,
    project_labels,
    slic_segment,
)
from .spectral import (
    coarse_mean_signal,
    coarsen,
    eigendecompose,
    graph_signal,
    graph_structure,
    laplacian,
    partition_super_ray,
    partition_with_tree,
)
from .transform import (
    QuantizedVector,
    dct1d,
    dequantize,
    gft,
    idct1d,
    predict_signal,
    quantize,
)
from .util import quantize_eighth, round_half_away, round_half_away_int


@dataclass
class CodecConfig:
    q_gft: float = 16.0
    q_dct: float = 1.0
    n_target: int = 256
    max_vertices: int = 512
    q_switch: int = 16
    slic_k: int = 100
    compactness: float = 10.0
    bin_width: float = 5.0
    explicit_groups: bool = False
    seed: int = 0
    residual_mode: str = "raw"   # 'raw' (exact) | 'dct' (lossy, for RD sweeps)
    grouping: bool = True
    channels: str = "y"          # 'y' | 'all'
    threads: int = 1

    def validate(self):
        if self.q_gft <= 0 or self.q_dct <= 0:
            raise ValueError("quantizer steps must be positive")
        if self.n_target < 1 or self.max_vertices < 1 or self.q_switch < 0:
            raise ValueError("size thresholds must be positive")
        if self.slic_k < 1 or self.compactness <= 0 or self.bin_width <= 0:
            raise ValueError("segmentation/grouping parameters must be positive")
        if self.residual_mode not in ("raw", "dct"):
            raise ValueError(f"unknown residual mode {self.residual_mode!r}")
        if self.channels not in ("y", "all"):
            raise ValueError(f"unknown channel mode {self.channels!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class CodingUnit:
    """One coded graph: a coarsened super-ray or a partitioned part."""

    index: int
    label: int
    part: int
    kind: str                 # 'coarse' | 'part'
    graph: object
    cmap: object
    fine_vertices: np.ndarray
    signals: list = None      # per-channel int vectors (encoder side only)

    @property
    def n(self):
        return self.graph.n


@dataclass
class EncodeReport:
    super_ray_count: int = 0
    unit_count: int = 0
    coarsened_count: int = 0
    partitioned_count: int = 0
    pair_count: int = 0
    mse_threshold: float = 0.0
    group_count: int = 0
    grouped_count: int = 0
    coarsened_ratio: float = 0.0
    overall_ratio: float = 0.0
    eig_count: int = 0
    worker_count: int = 1
    times: dict = field(default_factory=dict)
    debug: object = None

    def to_lines(self):
        out = [
            f"super_rays={self.super_ray_count}",
            f"units={self.unit_count}",
            f"coarsened={self.coarsened_count}",
            f"partitioned={self.partitioned_count}",
            f"pairs={self.pair_count}",
            f"mse_threshold={self.mse_threshold}",
            f"groups={self.group_count}",
            f"grouped={self.grouped_count}",
            f"ratio_coarsened={self.coarsened_ratio:.6f}",
            f"ratio_overall={self.overall_ratio:.6f}",
            f"eig_encoder={self.eig_count}",
            f"workers={self.worker_count}",
        ]
        out += [f"t_{k}_s={v:.6f}" for k, v in self.times.items()]
        return out


@dataclass
class DecodeReport:
    unit_count: int = 0
    group_count: int = 0
    grouped_count: int = 0
    eig_count: int = 0
    worker_count: int = 1
    times: dict = field(default_factory=dict)
    debug: object = None

    def to_lines(self):
        out = [
            f"units={self.unit_count}",
            f"groups={self.group_count}",
            f"grouped={self.grouped_count}",
            f"eig_decoder={self.eig_count}",
            f"workers={self.worker_count}",
        ]
        out += [f"t_{k}_s={v:.6f}" for k, v in self.times.items()]
        return out


@dataclass
class _DebugInfo:
    units: list = None
    group_set: object = None
    groupable: list = None
    dequantized: list = None
    reconstructed: list = None


class _Stopwatch:
    def __init__(self):
        self.times = {}
        self._last = time.perf_counter()

    def lap(self, name):
        now = time.perf_counter()
        self.times[name] = now - self._last
        self._last = now


# ---------------------------------------------------------------------------
# Shared structure pipeline
# ---------------------------------------------------------------------------

def _coded_planes(lf, mode):
    """Per-channel per-view int planes the codec transforms."""
    if mode == "all" and lf.channels == 3:
        return [lf.channel_planes(c) for c in range(3)]
    return [lf.luma_planes()]


def _build_units(srs, angular_dims, cfg_mode, n_target, max_vertices,
                 planes_by_channel, maxval, trees=None):
    """Turn super-rays into coding units.

    ``cfg_mode`` is 'coarse' or 'part'.  With ``planes_by_channel`` None
    (decoder) signals stay unset.  ``trees`` replays transmitted split
    trees; otherwise they are derived from ``max_vertices`` and returned.
    """
    units = []
    out_trees = {}
    for sr in srs:
        structure = graph_structure(sr, angular_dims)
        if cfg_mode == "coarse":
            coarse, cmap = coarsen(structure, n_target)
            signals = None
            if planes_by_channel is not None:
                signals = []
                for planes in planes_by_channel:
                    fine = graph_signal(structure, planes)
                    means = coarse_mean_signal(cmap, fine)
                    signals.append(
                        np.clip(round_half_away_int(means), 0, maxval)
                    )
            units.append(
                CodingUnit(
                    index=len(units), label=sr.label, part=0, kind="coarse",
                    graph=coarse, cmap=cmap, fine_vertices=structure.vertices,
                    signals=signals,
                )
            )
        else:
            if trees is not None:
                parts = partition_with_tree(sr, trees[sr.label], angular_dims)
            else:
                res = partition_super_ray(sr, max_vertices, angular_dims)
                parts = res.parts
                out_trees[sr.label] = res.tree
            for pi, part in enumerate(parts):
                pg = graph_structure(part, angular_dims)
                signals = None
                if planes_by_channel is not None:
                    signals = [
                        graph_signal(pg, planes).astype(np.int64)
                        for planes in planes_by_channel
                    ]
                units.append(
                    CodingUnit(
                        index=len(units), label=sr.label, part=pi, kind="part",
                        graph=pg, cmap=None, fine_vertices=pg.vertices,
                        signals=signals,
                    )
                )
    return units, (trees if trees is not None else out_trees)


def _quantize_unit(coeffs, q_gft):
    """Quantize one coefficient vector; index 0 (DC) uses min(q_gft, 1) so a
    constant signal survives any q_gft >= 1."""
    dc_step = min(q_gft, 1.0)
    levels = np.empty(coeffs.shape[0], dtype=np.int64)
    levels[:1] = quantize(coeffs[:1], dc_step).levels
    if coeffs.shape[0] > 1:
        levels[1:] = quantize(coeffs[1:], q_gft).levels
    return levels


def _dequantize_unit(levels, q_gft):
    dc_step = min(q_gft, 1.0)
    out = np.empty(levels.shape[0], dtype=np.float64)
    out[:1] = dequantize(QuantizedVector(levels=levels[:1], step=dc_step))
    if levels.shape[0] > 1:
        out[1:] = dequantize(QuantizedVector(levels=levels[1:], step=q_gft))
    return out


def _pool_map(fn, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _groupable_positions(units, n_target, grouping):
    if not grouping:
        return []
    return [u.index for u in units if u.kind == "coarse" and u.n == n_target]


# ---------------------------------------------------------------------------
# Section symbol packing
# ---------------------------------------------------------------------------

def _segmentation_symbols(labels):
    h, w = labels.shape
    syms = np.empty(h * w, dtype=np.int64)
    pos = 0
    for y in range(h):
        row = labels[y]
        up = labels[y - 1] if y > 0 else None
        for x in range(w):
            v = row[x]
            if x > 0 and row[x - 1] == v:
                syms[pos] = 0
            elif up is not None and up[x] == v:
                syms[pos] = 1
            else:
                syms[pos] = v + 2
            pos += 1
    return syms


def _segmentation_from_symbols(syms, w, h, label_count):
    labels = np.zeros((h, w), dtype=np.int64)
    pos = 0
    for y in range(h):
        for x in range(w):
            s = int(syms[pos])
            pos += 1
            if s == 0:
                if x == 0:
                    raise CorruptStreamError("corrupt stream: copy-left at row start")
                labels[y, x] = labels[y, x - 1]
            elif s == 1:
                if y == 0:
                    raise CorruptStreamError("corrupt stream: copy-up in first row")
                labels[y, x] = labels[y - 1, x]
            else:
                v = s - 2
                if v < 0 or v >= label_count:
                    raise CorruptStreamError(
                        f"corrupt stream: label {v} out of range at ({y},{x})"
                    )
                labels[y, x] = v
    return labels


def _structure_symbols(srs, mode, trees):
    syms = []
    for sr in srs:
        if mode == "coarse":
            syms.append(0)
        else:
            syms.append(1)
            syms.extend(trees[sr.label])
    return syms


def _parse_structure(syms, label_count):
    flags, trees = [], {}
    pos = 0
    for label in range(label_count):
        if pos >= len(syms):
            raise CorruptStreamError("corrupt stream: structure section short")
        flag = int(syms[pos])
        pos += 1
        if flag not in (0, 1):
            raise CorruptStreamError(f"corrupt stream: structure flag {flag}")
        flags.append(flag)
        if flag == 1:
            tree = []
            depth = 1
            while depth > 0:
                if pos >= len(syms):
                    raise CorruptStreamError("corrupt stream: split tree truncated")
                bit = int(syms[pos])
                pos += 1
                if bit not in (0, 1):
                    raise CorruptStreamError(f"corrupt stream: tree bit {bit}")
                tree.append(bit)
                depth += 1 if bit else -1
            trees[label] = tree
    if pos != len(syms):
        raise CorruptStreamError("corrupt stream: trailing structure symbols")
    return flags, trees


# ---------------------------------------------------------------------------
# Encoder
# ---------------------------------------------------------------------------

def encode(lf: LightField, dmap: DisparityMap, cfg: CodecConfig, debug=False):
    """Encode a light field; returns (Bitstream, EncodeReport)."""
    cfg.validate()
    if not lf.views:
        raise EmptyLightFieldError("empty light field")
    w, h = lf.spatial_dims
    if dmap.values.shape != (h, w):
        raise SrgcError(
            f"disparity map {dmap.values.shape} does not match views {h}x{w}"
        )
    watch = _Stopwatch()
    maxval = lf.max_value
    planes_by_channel = _coded_planes(lf, cfg.channels)
    n_channels = len(planes_by_channel)
    ref_luma = lf.luma_planes()[0]

    seg_ref = slic_segment(ref_luma, cfg.slic_k, cfg.compactness)
    disparities = {}
    for label in range(seg_ref.label_count):
        region = np.argwhere(seg_ref.reference == label)
        disparities[label] = quantize_eighth(median_disparity(region, dmap))
    watch.lap("segmentation")

    seg_all = project_labels(seg_ref, disparities, lf.angular_dims)
    srs = assemble_super_rays(seg_all, disparities)
    watch.lap("projection")

    mode = "coarse" if cfg.q_gft >= cfg.q_switch else "part"
    units, trees = _build_units(
        srs, lf.angular_dims, mode, cfg.n_target, cfg.max_vertices,
        planes_by_channel, maxval,
    )
    watch.lap("units")

    def _transform_unit(unit):
        basis = eigendecompose(laplacian(unit.graph))
        levels, deq = [], []
        for c in range(n_channels):
            coeffs = gft(basis, unit.signals[c].astype(np.float64)).coeffs
            lv = _quantize_unit(coeffs, cfg.q_gft)
            levels.append(lv)
            deq.append(_dequantize_unit(lv, cfg.q_gft))
        return basis, levels, deq

    results = _pool_map(_transform_unit, units, cfg.threads)
    bases = [r[0] for r in results]
    levels = [r[1] for r in results]
    deq = [r[2] for r in results]
    eig_count = len(units)
    watch.lap("eigen_transform")

    groupable = _groupable_positions(units, cfg.n_target, cfg.grouping)
    merged, threshold = derive_group_members(
        [deq[u][0] for u in groupable], cfg.bin_width
    )
    signals_luma = {pos: units[groupable[pos]].signals[0] for pos in
                    {i for g in merged for i in g}}
    groups = [
        SuperRayGroup(members=m, main_index=select_main(m, signals_luma))
        for m in merged
    ]
    grouped_positions = {i for g in groups for i in g.members}
    group_set = GroupSet(
        groups=groups,
        ungrouped=tuple(i for i in range(len(groupable)) if i not in grouped_positions),
        mse_threshold=threshold,
    )
    watch.lap("grouping")

    residual_syms = []
    for g in groups:
        main_unit = groupable[g.main_index]
        for pos in g.members:
            if pos == g.main_index:
                continue
            unit = units[groupable[pos]]
            for c in range(n_channels):
                _, residual = predict_and_residual(
                    bases[main_unit], deq[groupable[pos]][c], unit.signals[c], maxval
                )
                if cfg.residual_mode == "raw":
                    residual_syms.extend(int(r) for r in residual)
                else:
                    lv = quantize(dct1d(residual.astype(np.float64)), cfg.q_dct).levels
                    residual_syms.extend(int(r) for r in lv)
    watch.lap("residuals")

    coeff_syms = []
    for u in range(len(units)):
        for c in range(n_channels):
            coeff_syms.extend(int(v) for v in levels[u][c])
    group_syms = []
    if cfg.grouping:
        if cfg.explicit_groups:
            group_syms.append(len(groups))
            for g in groups:
                group_syms.append(g.main_index)
                group_syms.append(len(g.members))
                group_syms.extend(g.members)
        else:
            group_syms.extend(g.main_index for g in groups)

    disp_syms = [
        round_half_away(disparities[l] * 8) for l in range(seg_ref.label_count)
    ]
    seg_syms = _segmentation_symbols(seg_ref.reference)
    struct_syms = _structure_symbols(srs, mode, trees)

    sections = {
        bs.SEC_SEGMENTATION: bs.pack_section(
            len(seg_syms), entropy_encode(seg_syms, "labels")
        ),
        bs.SEC_DISPARITY: bs.pack_section(
            len(disp_syms), entropy_encode(disp_syms, "disparities")
        ),
        bs.SEC_STRUCTURE: bs.pack_section(
            len(struct_syms), entropy_encode(struct_syms, "structure")
        ),
        bs.SEC_COEFFICIENTS: bs.pack_section(
            len(coeff_syms), entropy_encode(coeff_syms, "gft")
        ),
        bs.SEC_GROUPS: bs.pack_section(
            len(group_syms), entropy_encode(group_syms, "group")
        ),
        bs.SEC_RESIDUALS: bs.pack_section(
            len(residual_syms), entropy_encode(residual_syms, "residual")
        ),
    }
    header = StreamHeader(
        angular_dims=lf.angular_dims,
        spatial_dims=lf.spatial_dims,
        bit_depth=lf.bit_depth,
        channels=n_channels,
        grouping=cfg.grouping,
        explicit_groups=cfg.explicit_groups,
        residual_mode=cfg.residual_mode,
        label_count=seg_ref.label_count,
        n_target=cfg.n_target,
        max_vertices=cfg.max_vertices,
        q_switch=cfg.q_switch,
        q_gft=cfg.q_gft,
        q_dct=cfg.q_dct,
        bin_width=cfg.bin_width,
    )
    stream = Bitstream(header=header, sections=sections)
    watch.lap("entropy")

    coarsened = sum(1 for u in units if u.kind == "coarse")
    m = len(groupable)
    grouped = group_set.grouped_count
    report = EncodeReport(
        super_ray_count=seg_ref.label_count,
        unit_count=len(units),
        coarsened_count=coarsened,
        partitioned_count=len(units) - coarsened,
        pair_count=m * (m - 1) // 2,
        mse_threshold=threshold,
        group_count=len(groups),
        grouped_count=grouped,
        coarsened_ratio=grouped / coarsened if coarsened else 0.0,
        overall_ratio=grouped / len(units) if units else 0.0,
        eig_count=eig_count,
        worker_count=cfg.threads,
        times=watch.times,
    )
    if debug:
        report.debug = _DebugInfo(
            units=units, group_set=group_set, groupable=groupable, dequantized=deq
        )
    return stream, report


# ---------------------------------------------------------------------------
# Decoder
# ---------------------------------------------------------------------------

def decode(stream: Bitstream, threads=1, debug=False):
    """Decode a bitstream; returns (LightField, DecodeReport)."""
    watch = _Stopwatch()
    hdr = stream.header
    s_count, t_count = hdr.angular_dims
    w, h = hdr.spatial_dims
    maxval = (1 << hdr.bit_depth) - 1

    def section_symbols(sid, category):
        if sid not in stream.sections:
            raise CorruptStreamError(
                f"corrupt stream: missing section '{bs.SECTION_NAMES[sid]}'"
            )
        count, payload = bs.unpack_section(stream.sections[sid], sid)
        return entropy_decode(payload, count, category)

    seg_syms = section_symbols(bs.SEC_SEGMENTATION, "labels")
    if seg_syms.size != w * h:
        raise CorruptStreamError("corrupt stream: segmentation symbol count")
    ref_labels = _segmentation_from_symbols(seg_syms, w, h, hdr.label_count)
    present = np.unique(ref_labels)
    if present.size != hdr.label_count:
        raise CorruptStreamError("corrupt stream: reference view misses labels")

    disp_syms = section_symbols(bs.SEC_DISPARITY, "disparities")
    if disp_syms.size != hdr.label_count:
        raise CorruptStreamError("corrupt stream: disparity count mismatch")
    disparities = {l: float(disp_syms[l]) / 8.0 for l in range(hdr.label_count)}
    watch.lap("segmentation")

    seg_ref = SegmentationMap(labels=[ref_labels], label_count=hdr.label_count)
    seg_all = project_labels(seg_ref, disparities, hdr.angular_dims)
    srs = assemble_super_rays(seg_all, disparities)
    watch.lap("projection")

    struct_syms = section_symbols(bs.SEC_STRUCTURE, "structure")
    flags, trees = _parse_structure(struct_syms, hdr.label_count)
    if any(f != flags[0] for f in flags):
        raise CorruptStreamError("corrupt stream: mixed structure modes")
    mode = "part" if flags and flags[0] == 1 else "coarse"
    try:
        units, _ = _build_units(
            srs, hdr.angular_dims, mode, hdr.n_target, hdr.max_vertices,
            None, maxval, trees=trees if mode == "part" else None,
        )
    except ValueError as e:
        raise CorruptStreamError(f"corrupt stream: {e}") from e
    watch.lap("units")

    n_channels = hdr.channels
    coeff_syms = section_symbols(bs.SEC_COEFFICIENTS, "gft")
    expected = sum(u.n for u in units) * n_channels
    if coeff_syms.size != expected:
        raise CorruptStreamError(
            f"corrupt stream: {coeff_syms.size} coefficients, expected {expected}"
        )
    deq = []
    pos = 0
    for u in units:
        per_channel = []
        for _ in range(n_channels):
            lv = coeff_syms[pos : pos + u.n]
            pos += u.n
            per_channel.append(_dequantize_unit(lv, hdr.q_gft))
        deq.append(per_channel)
    watch.lap("dequantize")

    groupable = _groupable_positions(units, hdr.n_target, hdr.grouping)
    group_syms = section_symbols(bs.SEC_GROUPS, "group")
    groups = []
    threshold = 0.0
    if hdr.grouping:
        if hdr.explicit_groups:
            groups = _parse_explicit_groups(group_syms, len(groupable))
        else:
            merged, threshold = derive_group_members(
                [deq[u][0] for u in groupable], hdr.bin_width
            )
            if group_syms.size != len(merged):
                raise CorruptStreamError(
                    f"corrupt stream: {group_syms.size} group mains for "
                    f"{len(merged)} derived groups"
                )
            for m, main in zip(merged, group_syms):
                if int(main) not in m:
                    raise CorruptStreamError("corrupt stream: main outside its group")
                groups.append(SuperRayGroup(members=m, main_index=int(main)))
    grouped_members = {}
    for gi, g in enumerate(groups):
        for posn in g.members:
            if posn != g.main_index:
                grouped_members[groupable[posn]] = gi
    watch.lap("grouping")

    to_decompose = [
        u.index for u in units if u.index not in grouped_members
    ]
    def _decompose(idx):
        return eigendecompose(laplacian(units[idx].graph))

    decomposed = dict(zip(to_decompose, _pool_map(_decompose, to_decompose, threads)))
    eig_count = len(to_decompose)
    watch.lap("eigen")

    resid_syms = section_symbols(bs.SEC_RESIDUALS, "residual")
    residuals = {}
    pos = 0
    for g in groups:
        for posn in g.members:
            if posn == g.main_index:
                continue
            uidx = groupable[posn]
            per_channel = []
            for _ in range(n_channels):
                n = units[uidx].n
                if pos + n > resid_syms.size:
                    raise CorruptStreamError("corrupt stream: residual section short")
                per_channel.append(resid_syms[pos : pos + n])
                pos += n
            residuals[uidx] = per_channel
    if pos != resid_syms.size:
        raise CorruptStreamError("corrupt stream: trailing residual symbols")

    planes = [
        [np.zeros((h, w), dtype=np.int64) for _ in range(s_count * t_count)]
        for _ in range(n_channels)
    ]
    recon_units = []
    for u in units:
        per_channel = []
        for c in range(n_channels):
            if u.index in grouped_members:
                g = groups[grouped_members[u.index]]
                main_basis = decomposed[groupable[g.main_index]]
                predicted = predict_signal(main_basis, deq[u.index][c], maxval)
                if hdr.residual_mode == "raw":
                    rec = predicted + residuals[u.index][c]
                else:
                    r = round_half_away_int(
                        idct1d(residuals[u.index][c].astype(np.float64) * hdr.q_dct)
                    )
                    rec = predicted + r
                rec = np.clip(rec, 0, maxval)
            else:
                rec = predict_signal(decomposed[u.index], deq[u.index][c], maxval)
            per_channel.append(rec)
            fine = rec[u.cmap.fine_to_coarse] if u.cmap is not None else rec
            v = u.fine_vertices
            for vi in np.unique(v[:, 0]):
                sel = v[:, 0] == vi
                planes[c][vi][v[sel, 1], v[sel, 2]] = fine[sel]
        recon_units.append(per_channel)
    watch.lap("reconstruct")

    dtype = _sample_dtype(hdr.bit_depth)
    views = [
        View(planes=[planes[c][v].astype(dtype) for c in range(n_channels)])
        for v in range(s_count * t_count)
    ]
    lf = LightField(views=views, angular_dims=hdr.angular_dims, bit_depth=hdr.bit_depth)
    watch.lap("assembly")

    report = DecodeReport(
        unit_count=len(units),
        group_count=len(groups),
        grouped_count=sum(len(g.members) for g in groups),
        eig_count=eig_count,
        worker_count=threads,
        times=watch.times,
    )
    if debug:
        report.debug = _DebugInfo(
            units=units,
            group_set=GroupSet(groups=groups, ungrouped=(), mse_threshold=threshold),
            groupable=groupable,
            dequantized=deq,
            reconstructed=recon_units,
        )
    return lf, report


def _parse_explicit_groups(syms, groupable_count):
    syms = [int(v) for v in syms]
    if not syms:
        return []
    pos = 0
    count = syms[pos]
    pos += 1
    groups = []
    for _ in range(count):
        if pos + 2 > len(syms):
            raise CorruptStreamError("corrupt stream: explicit group header short")
        main, n = syms[pos], syms[pos + 1]
        pos += 2
        members = tuple(syms[pos : pos + n])
        pos += n
        if len(members) != n or any(
            m < 0 or m >= groupable_count for m in members
        ) or main not in members:
            raise CorruptStreamError("corrupt stream: explicit group malformed")
        groups.append(SuperRayGroup(members=members, main_index=main))
    if pos != len(syms):
        raise CorruptStreamError("corrupt stream: trailing group symbols")
    return groups


# Re-exported container helpers: the codec's serialize/deserialize are the
# bitstream module's, bound here for API completeness.
serialize = bs.serialize
deserialize = bs.deserialize
