"""Price curves on time grids: evaluation, CSV emission and a small SVG plot."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .errors import DomainError
from .quad import QuadratureSpec

CSV_HEADER = "delta,K,k,t,method,value"
CURVE_METHODS = ("auto", "closed3", "integral", "last_passage", "mc")


@dataclass(frozen=True)
class TimeGrid:
    kind: str = "log"
    tmin: float = 1e-3
    tmax: float = 1e3
    points: int = 200

    def __post_init__(self):
        if self.kind not in ("log", "linear"):
            raise DomainError("grid kind must be 'log' or 'linear'")
        if not 0.0 < self.tmin < self.tmax or self.points < 2:
            raise DomainError("need 0 < tmin < tmax and at least 2 points")

    def values(self) -> np.ndarray:
        if self.kind == "log":
            return np.geomspace(self.tmin, self.tmax, self.points)
        return np.linspace(self.tmin, self.tmax, self.points)


@dataclass(frozen=True)
class CurveRequest:
    """Dimensions x levels x methods on one time grid.

    Levels are dual levels k unless ``by_strike`` is set, in which case they
    are strikes K.
    """

    deltas: tuple
    levels: tuple
    grid: TimeGrid = TimeGrid()
    methods: tuple = ("auto",)
    by_strike: bool = False

    def __post_init__(self):
        if not self.deltas or not self.levels or not self.methods:
            raise DomainError("deltas, levels and methods must be non-empty")
        for d in self.deltas:
            if not d > 2.0:
                raise DomainError("delta must exceed 2")
        for lv in self.levels:
            if not lv > 0.0 or math.isinf(lv):
                raise DomainError("levels must be positive and finite")
        for m in self.methods:
            if m not in CURVE_METHODS:
                raise DomainError(f"unknown method {m!r}")
        if "closed3" in self.methods and any(d != 3.0 for d in self.deltas):
            raise DomainError("closed3 is only allowed when every delta is 3")

    def params(self):
        for d in self.deltas:
            for lv in self.levels:
                yield analytic.make_params(d, lv) if self.by_strike else analytic.ModelParams.from_level(d, lv)


@dataclass
class PriceCurve:
    params: analytic.ModelParams
    method: str
    t: np.ndarray
    values: np.ndarray = field(repr=False)


def preset(name: str) -> CurveRequest:
    """``fig1``: delta = 3, k = 1, 1/2, ..., 1/10. ``fig2``: k = 1, delta = 3, 5, ..., 13."""
    grid = TimeGrid("log", 1e-3, 1e3, 200)
    if name == "fig1":
        return CurveRequest((3.0,), tuple(1.0 / j for j in range(1, 11)), grid)
    if name == "fig2":
        return CurveRequest(tuple(float(d) for d in range(3, 14, 2)), (1.0,), grid)
    raise DomainError(f"unknown preset {name!r}; choose fig1 or fig2")


def _resolve(method: str, p: analytic.ModelParams) -> str:
    if method == "auto":
        return "closed3" if p.is_bes3 else "integral"
    return method


def evaluate(req: CurveRequest, q: QuadratureSpec | None = None, mc_config=None) -> list[PriceCurve]:
    """All curves of a request, in (delta, level, method) order."""
    ts = req.grid.values()
    out = []
    for p in req.params():
        for m in req.methods:
            method = _resolve(m, p)
            if method == "mc":
                from . import mc

                cfg = mc_config or mc.MCConfig()
                vals = np.array([mc.estimate_price_mc(p, float(t), cfg).mean for t in ts])
            else:
                vals = np.array([analytic.price(p, float(t), method, q) for t in ts])
            out.append(PriceCurve(p, method, ts, vals))
    return out


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def to_csv(curves: list[PriceCurve]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for c in curves:
        p = c.params
        head = f"{p.delta!r},{p.strike!r},{p.dual_level!r}"
        for t, v in zip(c.t, c.values):
            buf.write(f"{head},{float(t)!r},{c.method},{_fmt(float(v))}\n")
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise DomainError("missing or wrong CSV header")
    rows = []
    for ln in lines[1:]:
        d, K, k, t, m, v = ln.split(",")
        rows.append({"delta": float(d), "K": float(K), "k": float(k), "t": float(t), "method": m, "value": float(v)})
    return rows


# --------------------------------------------------------------------------
# SVG

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def to_svg(curves: list[PriceCurve], title: str = "call price against maturity") -> str:
    """Static SVG 1.1 line chart with a log time axis.

    One panel per dimension when there are at least as many levels as
    dimensions, otherwise one panel per level.
    """
    deltas = sorted({c.params.delta for c in curves})
    levels = sorted({c.params.dual_level for c in curves}, reverse=True)
    per_delta = len(levels) >= len(deltas)
    keys = deltas if per_delta else levels
    pw, ph, ml, mt = 420, 300, 60, 40
    width = ml + len(keys) * (pw + 30)
    height = mt + ph + 60
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
    ]
    for i, key in enumerate(keys):
        mine = [c for c in curves if (c.params.delta if per_delta else c.params.dual_level) == key]
        x0 = ml + i * (pw + 30)
        ts = np.concatenate([c.t for c in mine])
        vs = np.concatenate([c.values for c in mine])
        lt0, lt1 = math.log10(ts.min()), math.log10(ts.max())
        vmax = float(vs.max()) or 1.0

        def sx(t):
            return x0 + (math.log10(t) - lt0) / (lt1 - lt0) * pw

        def sy(v):
            return mt + ph - v / vmax * ph

        label = f"delta = {key:g}" if per_delta else f"k = {key:.4g}"
        parts.append(f'<rect x="{x0}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>')
        parts.append(f'<text x="{x0 + pw / 2:.1f}" y="{mt - 6}" text-anchor="middle">{label}</text>')
        for e in range(math.ceil(lt0), math.floor(lt1) + 1):
            x = sx(10.0 ** e)
            parts.append(f'<line x1="{x:.1f}" y1="{mt + ph}" x2="{x:.1f}" y2="{mt + ph + 4}" stroke="#000"/>')
            parts.append(f'<text x="{x:.1f}" y="{mt + ph + 16}" text-anchor="middle">1e{e}</text>')
        for frac in (0.0, 0.5, 1.0):
            y = sy(frac * vmax)
            parts.append(f'<text x="{x0 - 4}" y="{y + 4:.1f}" text-anchor="end">{frac * vmax:.3g}</text>')
        parts.append(f'<text x="{x0 + pw / 2:.1f}" y="{mt + ph + 34}" text-anchor="middle">t</text>')
        for j, c in enumerate(mine):
            pts = " ".join(f"{sx(t):.2f},{sy(v):.2f}" for t, v in zip(c.t, c.values))
            col = _COLORS[j % len(_COLORS)]
            parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.2" points="{pts}"/>')
            tag = f"k = {c.params.dual_level:.3g}" if per_delta else f"delta = {c.params.delta:g}"
            parts.append(f'<text x="{x0 + pw - 6}" y="{mt + 14 + 13 * j}" text-anchor="end" fill="{col}">{tag}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def is_unimodal(values) -> bool:
    """Rise to an interior maximum, then fall. Flat stretches are allowed
    (prices underflow to 0 at small t) but the maximum must exceed both ends."""
    v = np.asarray(values, dtype=float)
    i = int(np.argmax(v))
    if i == 0 or i == v.size - 1 or not (v[i] > v[0] and v[i] > v[-1]):
        return False
    return bool(np.all(np.diff(v[: i + 1]) >= 0.0) and np.all(np.diff(v[i:]) <= 0.0))
