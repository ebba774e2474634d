"""Figure data files, gnuplot scripts, and rendered images.

Every figure is a pure function of a delimited data file: the CSV writers
here put down sorted, full-precision rows; the gnuplot emitters write small
scripts that plot those same files; and the matplotlib renderers read the
CSVs back rather than touching live objects, so a rendered image can always
be reproduced from the shipped data alone.

Numbers are written with ``repr`` (shortest round-trip form) and rows are
sorted on their leading numeric columns, which makes re-runs byte-identical.
"""

from __future__ import annotations

import csv
from typing import IO, Iterable, Sequence

from .concavity import HessianClassification
from .cover import CoverResult
from .npa import CurvePoint
from .randomness import RandomnessRegion

__all__ = [
    "write_rows",
    "concavity_rows",
    "cover_rows",
    "randomness_rows",
    "region_bound_rows",
    "npa_curve_rows",
    "gnuplot_fig1",
    "gnuplot_fig2",
    "gnuplot_fig3",
    "render_fig1",
    "render_fig2",
    "render_fig3",
]

FIG1_HEADER = ["r", "s", "t", "l1", "l2", "l3", "label"]
FIG2_HEADER = ["r", "s", "t", "omega", "cover", "gap", "in_region"]
FIG3_HEADER = ["delta", "r", "s", "t", "x", "y", "z", "guess_prob", "bits", "certified"]
REGION_HEADER = ["delta", "min_bits", "max_bits"]
CURVE_HEADER = ["delta", "level", "settings", "bits", "status", "gap"]


def _num(value) -> str:
    return repr(float(value))


def write_rows(fp: IO[str], header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def concavity_rows(classifications: Sequence[HessianClassification]) -> list[list[str]]:
    rows = []
    for item in classifications:
        r, s, t = item.point
        l1, l2, l3 = item.eigenvalues
        rows.append((float(r), float(s), float(t), l1, l2, l3, item.label))
    rows.sort(key=lambda row: row[:3])
    return [[_num(r), _num(s), _num(t), _num(a), _num(b), _num(c), label]
            for r, s, t, a, b, c, label in rows]


def cover_rows(results: Sequence[CoverResult]) -> list[list[str]]:
    rows = sorted(results, key=lambda res: res.point)
    return [
        [
            _num(res.point[0]),
            _num(res.point[1]),
            _num(res.point[2]),
            _num(res.omega),
            _num(res.cover_value),
            _num(res.gap),
            "1" if res.in_region else "0",
        ]
        for res in rows
    ]


def randomness_rows(regions: Sequence[RandomnessRegion]) -> list[list[str]]:
    flat = []
    for region in regions:
        for rep in region.members:
            flat.append((region.delta, rep.params.r, rep.params.s, rep.params.t,
                         rep.settings, rep.guess_prob, rep.bits, rep.certified))
    flat.sort(key=lambda row: (row[0], row[1], row[2], row[3], row[4]))
    return [
        [_num(delta), _num(r), _num(s), _num(t), str(st[0]), str(st[1]), str(st[2]),
         _num(guess), _num(bits), "1" if certified else "0"]
        for delta, r, s, t, st, guess, bits, certified in flat
    ]


def region_bound_rows(regions: Sequence[RandomnessRegion]) -> list[list[str]]:
    rows = []
    for region in sorted(regions, key=lambda reg: reg.delta):
        if region.empty:
            continue
        rows.append([_num(region.delta), _num(region.min_bits), _num(region.max_bits)])
    return rows


def npa_curve_rows(points: Sequence[CurvePoint]) -> list[list[str]]:
    def settings_tag(settings) -> str:
        if settings is None:
            return "all"
        return "-".join(str(v) for v in settings)

    ordered = sorted(points, key=lambda p: (p.delta, p.level, settings_tag(p.settings)))
    return [
        [_num(p.delta), p.level, settings_tag(p.settings), _num(p.bits), p.status, _num(p.gap)]
        for p in ordered
    ]


# ---------------------------------------------------------------------------
# gnuplot scripts
# ---------------------------------------------------------------------------

_GP_PREAMBLE = """\
set datafile separator ","
set terminal pngcairo size {width},{height}
set output "{output}"
"""


def gnuplot_fig1(csv_name: str = "fig1.csv", output: str = "fig1_gp.png") -> str:
    head = _GP_PREAMBLE.format(width=900, height=720, output=output)
    return head + f"""\
set title "Curvature classes of the Hardy probability"
set xlabel "r"
set ylabel "s"
set zlabel "t"
set view 60, 35
splot \\
  "{csv_name}" every ::1 using (strcol(7) eq "strictly-concave" ? $1 : 1/0):2:3 \\
    with points pt 7 ps 0.25 lc rgb "#1a7f37" title "strictly concave", \\
  "{csv_name}" every ::1 using (strcol(7) eq "indefinite" ? $1 : 1/0):2:3 \\
    with points pt 7 ps 0.1 lc rgb "#c9c9c9" title "indefinite"
"""


def gnuplot_fig2(csv_name: str = "fig2.csv", output: str = "fig2_gp.png") -> str:
    head = _GP_PREAMBLE.format(width=1350, height=460, output=output)
    panels = []
    for (i, j), (xl, yl) in zip(((1, 2), (1, 3), (2, 3)), (("r", "s"), ("r", "t"), ("s", "t"))):
        panels.append(f"""\
set xlabel "{xl}"
set ylabel "{yl}"
plot \\
  "{csv_name}" every ::1 using ($4 > 0 && $7 == 0 ? ${i} : 1/0):{j} \\
    with points pt 7 ps 0.2 lc rgb "#cc3311" title "filtered", \\
  "{csv_name}" every ::1 using ($7 == 1 ? ${i} : 1/0):{j} \\
    with points pt 7 ps 0.2 lc rgb "#1a7f37" title "self-testable"
""")
    return head + 'set multiplot layout 1,3 title "Self-testable region projections"\n' + "\n".join(panels) + "unset multiplot\n"


def gnuplot_fig3(
    region_csv: str = "fig3_region.csv",
    members_csv: str = "fig3.csv",
    curve_csv: str = "npa_curve.csv",
    output: str = "fig3_gp.png",
) -> str:
    head = _GP_PREAMBLE.format(width=900, height=620, output=output)
    return head + f"""\
set title "Certified randomness against the Hardy probability"
set xlabel "delta"
set ylabel "certified bits"
set key top left
plot \\
  "{region_csv}" every ::1 using 1:2:3 with filledcurves fc rgb "#9fd0a8" fs transparent solid 0.45 title "self-tested spread", \\
  "{region_csv}" every ::1 using 1:2 with lines lc rgb "#1a7f37" lw 1.2 notitle, \\
  "{region_csv}" every ::1 using 1:3 with lines lc rgb "#1a7f37" lw 1.2 notitle, \\
  "{members_csv}" every ::1 using 1:9 with points pt 6 ps 0.4 lc rgb "#1a7f37" title "slice members", \\
  "{curve_csv}" every ::1 using 1:4 with linespoints pt 7 ps 0.5 lc rgb "#2f5fa8" title "moment-relaxation bound"
"""


# ---------------------------------------------------------------------------
# matplotlib renders (read the CSVs back; lazy Agg import)
# ---------------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _read_csv(path: str) -> list[dict[str, str]]:
    with open(path, newline="") as fp:
        return list(csv.DictReader(fp))


def render_fig1(csv_path: str, png_path: str) -> str:
    plt = _pyplot()
    rows = _read_csv(csv_path)
    fig = plt.figure(figsize=(7.5, 6.0))
    ax = fig.add_subplot(projection="3d")
    for label, color, size in (("indefinite", "#c9c9c9", 1.0), ("strictly-concave", "#1a7f37", 3.0)):
        pts = [(float(r["r"]), float(r["s"]), float(r["t"])) for r in rows if r["label"] == label]
        if pts:
            xs, ys, zs = zip(*pts)
            ax.scatter(xs, ys, zs, s=size, c=color, label=label, depthshade=False)
    ax.set_xlabel("r")
    ax.set_ylabel("s")
    ax.set_zlabel("t")
    ax.set_title("Curvature classes of the Hardy probability")
    ax.legend(loc="upper left", markerscale=4)
    fig.savefig(png_path, dpi=110)
    plt.close(fig)
    return png_path


def render_fig2(csv_path: str, png_path: str) -> str:
    plt = _pyplot()
    rows = _read_csv(csv_path)
    green = [r for r in rows if r["in_region"] == "1"]
    red = [r for r in rows if r["in_region"] != "1" and float(r["omega"]) > 0.0]
    fig, axes = plt.subplots(1, 3, figsize=(13.0, 4.2))
    for ax, (cx, cy) in zip(axes, (("r", "s"), ("r", "t"), ("s", "t"))):
        ax.scatter([float(r[cx]) for r in red], [float(r[cy]) for r in red],
                   s=2.0, c="#cc3311", label="filtered")
        ax.scatter([float(r[cx]) for r in green], [float(r[cy]) for r in green],
                   s=2.0, c="#1a7f37", label="self-testable")
        ax.set_xlabel(cx)
        ax.set_ylabel(cy)
    axes[0].legend(loc="upper left", markerscale=3)
    fig.suptitle("Self-testable region projections")
    fig.tight_layout()
    fig.savefig(png_path, dpi=110)
    plt.close(fig)
    return png_path


def render_fig3(region_csv: str, members_csv: str, curve_csv: str, png_path: str) -> str:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.5, 5.2))
    bounds = _read_csv(region_csv)
    if bounds:
        deltas = [float(r["delta"]) for r in bounds]
        lo = [float(r["min_bits"]) for r in bounds]
        hi = [float(r["max_bits"]) for r in bounds]
        ax.fill_between(deltas, lo, hi, color="#9fd0a8", alpha=0.6, label="self-tested spread")
        ax.plot(deltas, lo, color="#1a7f37", lw=1.0)
        ax.plot(deltas, hi, color="#1a7f37", lw=1.0)
    members = _read_csv(members_csv)
    if members:
        ax.scatter([float(r["delta"]) for r in members], [float(r["bits"]) for r in members],
                   s=9.0, facecolors="none", edgecolors="#1a7f37", label="slice members")
    try:
        curve = [r for r in _read_csv(curve_csv) if r["status"] == "optimal"]
    except FileNotFoundError:
        curve = []
    if curve:
        ax.plot([float(r["delta"]) for r in curve], [float(r["bits"]) for r in curve],
                marker="o", ms=3.5, color="#2f5fa8", label="moment-relaxation bound")
    ax.set_xlabel("delta")
    ax.set_ylabel("certified bits")
    ax.set_title("Certified randomness against the Hardy probability")
    if bounds or members or curve:
        ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(png_path, dpi=110)
    plt.close(fig)
    return png_path
