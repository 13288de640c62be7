"""Quality/rate metrics and the rate-distortion sweep harness.

PSNR is computed over the luma samples of all views; BPP divides the
serialized stream bits by the whole-light-field pixel count S*T*W*H.
Identical inputs yield +inf PSNR, serialized as the string ``inf`` in CSV.
Eigendecomposition counts are deterministic; wall times are the only
nondeterministic columns.
"""

import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .bitstream import serialize
from .codec import CodecConfig, decode, encode

CSV_COLUMNS = (
    "q_gft,q_dct,bpp,psnr_y,eig_enc,eig_dec,groups,grouped,"
    "coarsened,total_sr,ratio_c,ratio_o,t_enc_s,t_dec_s"
)


@dataclass
class RDPoint:
    """One sweep measurement; wall times are the only nondeterministic
    fields."""

    q_gft: float
    q_dct: float
    bpp: float
    psnr_y: float
    eig_enc: int
    eig_dec: int
    groups: int
    grouped: int
    coarsened: int
    total_sr: int
    ratio_c: float
    ratio_o: float
    t_enc_s: float
    t_dec_s: float


def psnr(a, b):
    """Luma PSNR in dB between two light fields of identical geometry."""
    if (a.angular_dims, a.spatial_dims, a.bit_depth) != (
        b.angular_dims,
        b.spatial_dims,
        b.bit_depth,
    ):
        raise ValueError("PSNR requires identical dimensions and bit depth")
    pa = a.luma_planes()
    pb = b.luma_planes()
    sq = 0.0
    n = 0
    for x, y in zip(pa, pb):
        d = x.astype(np.float64) - y.astype(np.float64)
        sq += float((d * d).sum())
        n += d.size
    if sq == 0.0:
        return math.inf
    mse = sq / n
    return 10.0 * math.log10(a.max_value ** 2 / mse)


def bpp(stream, lf_dims):
    """Bits per pixel: 8 * stream bytes / (S*T*W*H)."""
    (s, t), (w, h) = lf_dims
    return 8.0 * len(serialize(stream)) / (s * t * w * h)


def grouping_ratios(report):
    """Exact grouped/coarsened and grouped/total quotients from a report."""
    if report.grouped_count == 0:
        return (0.0, 0.0)
    return (
        report.grouped_count / report.coarsened_count,
        report.grouped_count / report.unit_count,
    )


def _fmt(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return f"{x:.6f}"
    return str(x)


def rd_sweep(lf, dmap, q_list, cfg: CodecConfig):
    """One encode+decode per q_gft value; returns (points, csv_text)."""
    if not q_list:
        raise ValueError("q_list must be non-empty")
    points = []
    for q in q_list:
        run_cfg = replace(cfg, q_gft=float(q))
        stream, enc_rep = encode(lf, dmap, run_cfg)
        rec, dec_rep = decode(stream, threads=run_cfg.threads)
        points.append(
            RDPoint(
                q_gft=float(q),
                q_dct=run_cfg.q_dct,
                bpp=bpp(stream, (lf.angular_dims, lf.spatial_dims)),
                psnr_y=psnr(lf, rec),
                eig_enc=enc_rep.eig_count,
                eig_dec=dec_rep.eig_count,
                groups=enc_rep.group_count,
                grouped=enc_rep.grouped_count,
                coarsened=enc_rep.coarsened_count,
                total_sr=enc_rep.unit_count,
                ratio_c=enc_rep.coarsened_ratio,
                ratio_o=enc_rep.overall_ratio,
                t_enc_s=sum(enc_rep.times.values()),
                t_dec_s=sum(dec_rep.times.values()),
            )
        )
    return points, render_csv(points)


def render_csv(points):
    buf = io.StringIO()
    buf.write(CSV_COLUMNS + "\n")
    for p in points:
        buf.write(",".join(_fmt(getattr(p, k)) for k in CSV_COLUMNS.split(",")) + "\n")
    return buf.getvalue()
