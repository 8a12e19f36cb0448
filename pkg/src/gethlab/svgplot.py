"""Minimal native SVG plotting: scatter, line, linear or log axes.

Output is deterministic (no timestamps or random ids), so identical data
produces byte-identical files. This intentionally covers only what the
report figures need; it is not a general plotting library.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

_PALETTE = ("#1f6fb4", "#d45500", "#2e8b57", "#8b2e8b", "#b4a11f", "#555555")


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt(v: float) -> str:
    """Short tick label; trims trailing zeros."""
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return s


class Figure:
    """One set of axes; add artists, then save.

    x_scale / y_scale are "linear" or "log". Data limits grow automatically
    with each artist unless set_xlim/set_ylim pin them.
    """

    def __init__(self, width: int = 640, height: int = 440,
                 x_scale: str = "linear", y_scale: str = "linear",
                 title: str = "", x_label: str = "", y_label: str = ""):
        for s in (x_scale, y_scale):
            if s not in ("linear", "log"):
                raise ValueError(f"unknown scale {s!r}")
        self.width = width
        self.height = height
        self.x_scale = x_scale
        self.y_scale = y_scale
        self.title = title
        self.x_label = x_label
        self.y_label = y_label
        self.margin = (60, 20, 45 if title else 25, 50)  # left right top bottom
        self._artists: list[tuple] = []
        self._legend: list[tuple[str, str]] = []
        self._xlim: tuple[float, float] | None = None
        self._ylim: tuple[float, float] | None = None
        self._seen_x: list[float] = []
        self._seen_y: list[float] = []

    # ------------------------------------------------------------------
    def _note(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if self.x_scale == "log":
            ok &= x > 0
        if self.y_scale == "log":
            ok &= y > 0
        x, y = x[ok], y[ok]
        self._seen_x.extend(x.tolist())
        self._seen_y.extend(y.tolist())
        return x, y

    def scatter(self, x, y, color: str | None = None, radius: float = 2.5,
                label: str = ""):
        color = color or _PALETTE[len(self._legend) % len(_PALETTE)]
        x, y = self._note(x, y)
        self._artists.append(("scatter", x, y, color, radius))
        if label:
            self._legend.append((label, color))
        return self

    def line(self, x, y, color: str | None = None, width: float = 1.6,
             dash: str = "", label: str = ""):
        color = color or _PALETTE[len(self._legend) % len(_PALETTE)]
        x, y = self._note(x, y)
        self._artists.append(("line", x, y, color, width, dash))
        if label:
            self._legend.append((label, color))
        return self

    def hline(self, y: float, color: str = "#999999", dash: str = "4,3"):
        self._artists.append(("hline", float(y), color, dash))
        return self

    def vline(self, x: float, color: str = "#999999", dash: str = "4,3"):
        self._artists.append(("vline", float(x), color, dash))
        return self

    def set_xlim(self, lo: float, hi: float):
        self._xlim = (lo, hi)
        return self

    def set_ylim(self, lo: float, hi: float):
        self._ylim = (lo, hi)
        return self

    # ------------------------------------------------------------------
    def _limits(self):
        def pad(lo, hi, scale):
            if scale == "log":
                if hi <= lo:
                    return lo / 2, lo * 2
                f = (hi / lo) ** 0.05
                return lo / f, hi * f
            if hi <= lo:
                return lo - 1.0, hi + 1.0
            d = 0.05 * (hi - lo)
            return lo - d, hi + d

        if self._xlim is not None:
            xlo, xhi = self._xlim
        elif self._seen_x:
            xlo, xhi = pad(min(self._seen_x), max(self._seen_x), self.x_scale)
        else:
            xlo, xhi = (0.1, 10.0) if self.x_scale == "log" else (0.0, 1.0)
        if self._ylim is not None:
            ylo, yhi = self._ylim
        elif self._seen_y:
            ylo, yhi = pad(min(self._seen_y), max(self._seen_y), self.y_scale)
        else:
            ylo, yhi = (0.1, 10.0) if self.y_scale == "log" else (0.0, 1.0)
        return xlo, xhi, ylo, yhi

    def _ticks(self, lo, hi, scale):
        if scale == "linear":
            return _nice_ticks(lo, hi)
        dec_lo = math.ceil(math.log10(lo) - 1e-9)
        dec_hi = math.floor(math.log10(hi) + 1e-9)
        if dec_hi >= dec_lo:
            return [10.0**d for d in range(dec_lo, dec_hi + 1)]
        return _nice_ticks(lo, hi)

    def to_svg(self) -> str:
        ml, mr, mt, mb = self.margin
        pw = self.width - ml - mr
        ph = self.height - mt - mb
        xlo, xhi, ylo, yhi = self._limits()

        def tx(v):
            if self.x_scale == "log":
                f = (math.log10(v) - math.log10(xlo)) / (math.log10(xhi) - math.log10(xlo))
            else:
                f = (v - xlo) / (xhi - xlo)
            return ml + f * pw

        def ty(v):
            if self.y_scale == "log":
                f = (math.log10(v) - math.log10(ylo)) / (math.log10(yhi) - math.log10(ylo))
            else:
                f = (v - ylo) / (yhi - ylo)
            return mt + (1.0 - f) * ph

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            f'<rect width="{self.width}" height="{self.height}" fill="white"/>',
        ]
        # frame and ticks
        out.append(
            f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
            'stroke="black" stroke-width="1"/>'
        )
        font = 'font-family="Helvetica,Arial,sans-serif" font-size="11"'
        for v in self._ticks(xlo, xhi, self.x_scale):
            if not xlo <= v <= xhi:
                continue
            px = tx(v)
            out.append(f'<line x1="{px:.2f}" y1="{mt + ph}" x2="{px:.2f}" '
                       f'y2="{mt + ph + 4}" stroke="black"/>')
            out.append(f'<text x="{px:.2f}" y="{mt + ph + 16}" text-anchor="middle" '
                       f'{font}>{_fmt(v)}</text>')
        for v in self._ticks(ylo, yhi, self.y_scale):
            if not ylo <= v <= yhi:
                continue
            py = ty(v)
            out.append(f'<line x1="{ml - 4}" y1="{py:.2f}" x2="{ml}" '
                       f'y2="{py:.2f}" stroke="black"/>')
            out.append(f'<text x="{ml - 7}" y="{py + 3.5:.2f}" text-anchor="end" '
                       f'{font}>{_fmt(v)}</text>')
        if self.title:
            out.append(f'<text x="{self.width / 2:.1f}" y="20" text-anchor="middle" '
                       'font-family="Helvetica,Arial,sans-serif" '
                       f'font-size="14">{self.title}</text>')
        if self.x_label:
            out.append(f'<text x="{ml + pw / 2:.1f}" y="{self.height - 8}" '
                       f'text-anchor="middle" {font}>{self.x_label}</text>')
        if self.y_label:
            out.append(
                f'<text x="14" y="{mt + ph / 2:.1f}" text-anchor="middle" {font} '
                f'transform="rotate(-90 14 {mt + ph / 2:.1f})">{self.y_label}</text>'
            )

        out.append(f'<clipPath id="plot"><rect x="{ml}" y="{mt}" width="{pw}" '
                   f'height="{ph}"/></clipPath>')
        out.append('<g clip-path="url(#plot)">')
        for art in self._artists:
            if art[0] == "scatter":
                _, x, y, color, radius = art
                for xi, yi in zip(x, y):
                    out.append(f'<circle cx="{tx(xi):.2f}" cy="{ty(yi):.2f}" '
                               f'r="{radius}" fill="{color}" fill-opacity="0.75"/>')
            elif art[0] == "line":
                _, x, y, color, width, dash = art
                if len(x) == 0:
                    continue
                pts = " ".join(f"{tx(xi):.2f},{ty(yi):.2f}" for xi, yi in zip(x, y))
                extra = f' stroke-dasharray="{dash}"' if dash else ""
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                           f'stroke-width="{width}"{extra}/>')
            elif art[0] == "hline":
                _, y, color, dash = art
                if ylo <= y <= yhi:
                    out.append(f'<line x1="{ml}" y1="{ty(y):.2f}" x2="{ml + pw}" '
                               f'y2="{ty(y):.2f}" stroke="{color}" '
                               f'stroke-dasharray="{dash}"/>')
            elif art[0] == "vline":
                _, x, color, dash = art
                if xlo <= x <= xhi:
                    out.append(f'<line x1="{tx(x):.2f}" y1="{mt}" x2="{tx(x):.2f}" '
                               f'y2="{mt + ph}" stroke="{color}" '
                               f'stroke-dasharray="{dash}"/>')
        out.append("</g>")

        for i, (label, color) in enumerate(self._legend):
            lx = ml + pw - 150
            ly = mt + 14 + 16 * i
            out.append(f'<rect x="{lx}" y="{ly - 8}" width="10" height="10" '
                       f'fill="{color}"/>')
            out.append(f'<text x="{lx + 15}" y="{ly + 1}" {font}>{label}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_svg())
        return path
