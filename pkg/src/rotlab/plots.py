"""Plot data: a CSV per figure plus a standalone SVG drawn with polylines and polygons."""
from __future__ import annotations

import csv
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import InvalidInput, MissingEvidence

KINDS = ("d_n", "deviation", "shapes", "rotation")
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
W, H, PAD = 480, 360, 40


def _series(r, key):
    data = r.data if hasattr(r, "data") else r
    val = data.get("series", {}).get(key)
    if not val:
        raise MissingEvidence(f"series.{key}")
    return val


class _Canvas:
    """Maps data coordinates into a fixed SVG viewport."""

    def __init__(self, xs, ys, equal=False):
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        if x1 == x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if y1 == y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        sx, sy = (W - 2 * PAD) / (x1 - x0), (H - 2 * PAD) / (y1 - y0)
        if equal:
            sx = sy = min(sx, sy)
        self.x0, self.y0, self.sx, self.sy = x0, y0, sx, sy
        self.items = []

    def pts(self, xy):
        return " ".join(f"{PAD + (x - self.x0) * self.sx:.2f},{H - PAD - (y - self.y0) * self.sy:.2f}" for x, y in xy)

    def polyline(self, xy, color):
        self.items.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{self.pts(xy)}"/>')

    def polygon(self, xy, color):
        self.items.append(f'<polygon fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="1.2" '
                          f'points="{self.pts(xy)}"/>')

    def svg(self, title: str) -> str:
        frame = [(PAD, PAD), (W - PAD, PAD), (W - PAD, H - PAD), (PAD, H - PAD), (PAD, PAD)]
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">\n'
                f'<title>{escape(title)}</title>\n'
                f'<polyline fill="none" stroke="#999" points="{" ".join(f"{a},{b}" for a, b in frame)}"/>\n')
        return head + "\n".join(self.items) + "\n</svg>\n"


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _num(v):
    return float(v) if not isinstance(v, str) else float(v.replace("inf", "Infinity"))


def emit_plot_data(r, kind: str, out_dir) -> list:
    """Write <kind>.csv and <kind>.svg into out_dir and return both paths."""
    if kind not in KINDS:
        raise InvalidInput(f"unknown plot kind {kind!r}; choose from {KINDS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, svg_path = out / f"{kind}.csv", out / f"{kind}.svg"
    data = r.data if hasattr(r, "data") else r

    if kind == "d_n":
        d = [_num(v) for v in _series(r, "d_n")]
        _write_csv(csv_path, ["n", "d_n"], [(n, repr(v)) for n, v in enumerate(d)])
        c = _Canvas(range(len(d)), d)
        c.polyline(list(enumerate(d)), COLORS[0])
        title = "d_n"
    elif kind == "deviation":
        rows = _series(r, "deviation")
        N = max(len(e["dev"]) for e in rows)
        header = ["n"] + [f"dev_{e['p']}_{e['q']}" for e in rows]
        table = [[n] + [repr(_num(e["dev"][n])) if n < len(e["dev"]) else "" for e in rows] for n in range(N)]
        _write_csv(csv_path, header, table)
        c = _Canvas(range(N), [_num(v) for e in rows for v in e["dev"]])
        for i, e in enumerate(rows):
            c.polyline(list(enumerate(_num(v) for v in e["dev"])), COLORS[i % len(COLORS)])
        title = "deviation"
    elif kind == "shapes":
        shapes = _series(r, "shapes")
        _write_csv(csv_path, ["n", "x", "y"],
                   [(s["n"], repr(x), repr(y)) for s in shapes for x, y in s["vertices"]])
        c = _Canvas([x for s in shapes for x, _ in s["vertices"]], [y for s in shapes for _, y in s["vertices"]],
                    equal=True)
        for i, s in enumerate(shapes):
            c.polygon(s["vertices"], COLORS[i % len(COLORS)])
        title = "normalized shapes"
    else:
        est = (data.get("rotation") or {}).get("estimate")
        if not est:
            raise MissingEvidence("rotation")
        if "hull" in est:
            verts = est["hull"]
            _write_csv(csv_path, ["x", "y"], [(repr(x), repr(y)) for x, y in verts])
            c = _Canvas([x for x, _ in verts], [y for _, y in verts], equal=True)
            if len(verts) >= 3:
                c.polygon(verts, COLORS[0])
            else:
                c.polyline(verts if len(verts) == 2 else verts * 2, COLORS[0])
        else:
            lo, hi = est["interval"]
            _write_csv(csv_path, ["lo", "hi"], [(repr(lo), repr(hi))])
            c = _Canvas([lo, hi], [0.0, 0.0])
            c.polyline([(lo, 0.0), (hi, 0.0)], COLORS[0])
        title = "rotation set estimate"
    svg_path.write_text(c.svg(f"{data.get('label', '')} {title}".strip()))
    return [csv_path, svg_path]
