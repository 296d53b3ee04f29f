"""Minimal SVG line plots (no plotting library needed)."""
import math
from xml.sax.saxutils import escape

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(v)
        v += step
    return ticks


class Panel:
    def __init__(self, x0, y0, width, height, title, xlabel, ylabel, logy=False):
        self.box = (x0, y0, width, height)
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.logy = logy
        self.series = []

    def add(self, xs, ys, label):
        pts = []
        for x, y in zip(xs, ys):
            if self.logy:
                if not y > 0:
                    continue
                y = math.log10(y)
            if math.isfinite(x) and math.isfinite(y):
                pts.append((x, y))
        self.series.append((pts, label))

    def render(self):
        x0, y0, w, h = self.box
        allpts = [p for pts, _ in self.series for p in pts]
        parts = [f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#444"/>']
        parts.append(
            f'<text x="{x0 + w / 2}" y="{y0 - 10}" text-anchor="middle" font-size="14">{escape(self.title)}</text>'
        )
        if not allpts:
            parts.append(f'<text x="{x0 + w / 2}" y="{y0 + h / 2}" text-anchor="middle">no data</text>')
            return "\n".join(parts)
        xlo, xhi = min(p[0] for p in allpts), max(p[0] for p in allpts)
        ylo, yhi = min(p[1] for p in allpts), max(p[1] for p in allpts)
        if yhi - ylo < 1e-12 * max(1.0, abs(yhi)):
            ylo, yhi = ylo - 0.5, yhi + 0.5
        if xhi <= xlo:
            xhi = xlo + 1.0

        def sx(x):
            return x0 + (x - xlo) / (xhi - xlo) * w

        def sy(y):
            return y0 + h - (y - ylo) / (yhi - ylo) * h

        for tx in _nice_ticks(xlo, xhi):
            parts.append(f'<line x1="{sx(tx):.2f}" y1="{y0 + h}" x2="{sx(tx):.2f}" y2="{y0 + h + 5}" stroke="#444"/>')
            parts.append(f'<text x="{sx(tx):.2f}" y="{y0 + h + 18}" text-anchor="middle" font-size="11">{tx:g}</text>')
        for ty in _nice_ticks(ylo, yhi):
            label = f"1e{ty:g}" if self.logy else f"{ty:g}"
            parts.append(f'<line x1="{x0 - 5}" y1="{sy(ty):.2f}" x2="{x0}" y2="{sy(ty):.2f}" stroke="#444"/>')
            parts.append(
                f'<text x="{x0 - 8}" y="{sy(ty) + 4:.2f}" text-anchor="end" font-size="11">{label}</text>'
            )
        parts.append(
            f'<text x="{x0 + w / 2}" y="{y0 + h + 36}" text-anchor="middle" font-size="12">{escape(self.xlabel)}</text>'
        )
        parts.append(
            f'<text x="{x0 - 52}" y="{y0 + h / 2}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 {x0 - 52} {y0 + h / 2})">{escape(self.ylabel)}</text>'
        )
        for i, (pts, label) in enumerate(self.series):
            color = COLORS[i % len(COLORS)]
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            ly = y0 + 16 + 16 * i
            parts.append(f'<line x1="{x0 + w - 110}" y1="{ly}" x2="{x0 + w - 90}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
            parts.append(f'<text x="{x0 + w - 85}" y="{ly + 4}" font-size="11">{escape(label)}</text>')
        return "\n".join(parts)


def figure(panels, width, height):
    body = "\n".join(p.render() for p in panels)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n'
    )


def energy_figure(records, title=""):
    """Left: ``E_n(psi)`` and ``Q_n`` on a linear axis. Right: ``E_n(phi)`` on a log axis."""
    t = [r.t for r in records]
    left = Panel(80, 50, 380, 300, f"{title} energies".strip(), "t", "energy")
    left.add(t, [r.e_psi for r in records], "E_n(psi)")
    left.add(t, [r.q for r in records], "Q_n")
    right = Panel(570, 50, 380, 300, f"{title} zero-mean energy".strip(), "t", "E_n(phi)", logy=True)
    right.add(t, [r.e_phi for r in records], "E_n(phi)")
    right.add(t, [r.gap for r in records], "|E_n(psi) - Q_n|")
    return figure([left, right], 1000, 410)
