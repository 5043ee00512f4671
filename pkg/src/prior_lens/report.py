"""Report tables and a static two-row SVG chart of fitted prediction functions.

Each scenario gets a column: predictions on top (observed t* as dots, the
winning family's prediction function as a line, t* = 2t dashed), the recovered
prior density underneath.
"""
import csv
import io
import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np
from pydantic import BaseModel

from prior_lens.fitting import FitResult
from prior_lens.priors import PredictionPair, QuadratureConfig, log_prior_density, median_curve
from prior_lens.store import PathLike, atomic_write_text

logger = logging.getLogger("prior_lens.report")

DENSITY_POINTS = 201
DISPLAY_HEADROOM = 1.5
PANEL_WIDTH = 280
PANEL_HEIGHT = 210
MARGIN = 40
FAMILY_COLORS = {"power-law": "#1f77b4", "erlang": "#d62728", "gaussian": "#2ca02c"}


class CurveRow(BaseModel):
    t: float
    observed: float
    fitted: Dict[str, float]


class ScenarioReport(BaseModel):
    """Prediction-curve table, recovered-prior density and winning fit."""

    label: str
    curve: List[CurveRow]
    density: List[Tuple[float, float]]
    winner: FitResult
    results: List[FitResult]


ReportBundle = List[ScenarioReport]


def _density_table(result: FitResult, lower: float, upper: float) -> List[Tuple[float, float]]:
    """Winner's prior density on [lower, upper], normalized to unit trapezoid area."""
    prior = result.to_prior()
    xs = np.linspace(lower, upper, DENSITY_POINTS)
    log_d = np.array([log_prior_density(prior, x) for x in xs])
    weights = np.exp(log_d - np.max(log_d))
    area = float(np.trapezoid(weights, xs))
    return [(float(x), float(w / area)) for x, w in zip(xs, weights)]


def build_scenario_report(
    label: str,
    pairs: Sequence[PredictionPair],
    results: Sequence[FitResult],
    cfg: Optional[QuadratureConfig] = None,
) -> ScenarioReport:
    """Assemble the tables for one scenario from its pairs and ranked fits."""
    t = np.asarray([p.t for p in pairs], dtype=float)
    fitted = {r.family: median_curve(r.to_prior(), t, cfg) for r in results}
    curve = [
        CurveRow(
            t=pair.t,
            observed=pair.t_star,
            fitted={family: float(values[i]) for family, values in fitted.items()},
        )
        for i, pair in enumerate(pairs)
    ]
    winner = results[0]
    upper = DISPLAY_HEADROOM * float(np.max(fitted[winner.family]))
    lower = float(t.min())
    return ScenarioReport(
        label=label,
        curve=curve,
        density=_density_table(winner, lower, upper),
        winner=winner,
        results=list(results),
    )


def curve_to_csv(report: ScenarioReport) -> str:
    families = [r.family for r in report.results]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t", "observed", *families])
    for row in report.curve:
        writer.writerow([repr(row.t), repr(row.observed)] + [repr(row.fitted[f]) for f in families])
    return buffer.getvalue()


def density_to_csv(report: ScenarioReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["x", "density"])
    for x, d in report.density:
        writer.writerow([repr(x), repr(d)])
    return buffer.getvalue()


class SvgCanvas:
    """Minimal SVG document builder."""

    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self.elements: List[str] = []

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0, dash: Optional[str] = None):
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="{width}"{dash_attr}/>'
        )

    def polyline(self, points, stroke="#000000", width=1.5, dash: Optional[str] = None):
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width}"{dash_attr}/>'
        )

    def circle(self, x, y, radius=2.0, fill="#000000"):
        self.elements.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" fill="{fill}"/>')

    def text(self, x, y, content: str, size=11, anchor="start", fill="#333333"):
        self.elements.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" font-family="sans-serif" '
            f'text-anchor="{anchor}" fill="{fill}">{escape(content)}</text>'
        )

    def render(self) -> str:
        body = "\n".join(self.elements)
        return (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>\n'
            f"{body}\n</svg>\n"
        )


class _Panel:
    """Maps data coordinates into one panel's pixel box."""

    def __init__(self, left, top, x_range, y_range):
        self.left = left + MARGIN
        self.top = top + MARGIN / 2
        self.width = PANEL_WIDTH - 1.5 * MARGIN
        self.height = PANEL_HEIGHT - 1.5 * MARGIN
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range

    def point(self, x, y):
        px = self.left + (x - self.x0) / (self.x1 - self.x0) * self.width
        py = self.top + self.height - (y - self.y0) / (self.y1 - self.y0) * self.height
        return px, py

    def axes(self, canvas: SvgCanvas, x_label: str, y_label: str):
        bottom = self.top + self.height
        canvas.line(self.left, bottom, self.left + self.width, bottom)
        canvas.line(self.left, self.top, self.left, bottom)
        canvas.text(self.left, bottom + 14, f"{self.x0:.3g}", size=9, anchor="middle")
        canvas.text(self.left + self.width, bottom + 14, f"{self.x1:.3g}", size=9, anchor="middle")
        canvas.text(self.left - 4, bottom, f"{self.y0:.3g}", size=9, anchor="end")
        canvas.text(self.left - 4, self.top + 8, f"{self.y1:.3g}", size=9, anchor="end")
        canvas.text(self.left + self.width / 2, bottom + 26, x_label, size=10, anchor="middle")
        canvas.text(self.left - 30, self.top - 4, y_label, size=10)


def _describe(result: FitResult) -> str:
    symbols = {"gamma": "γ", "beta": "β", "mu": "μ", "sigma": "σ"}
    params = ", ".join(f"{symbols.get(k, k)}={v:.2f}" for k, v in result.params.items())
    return f"{result.family} {params}"


def render_svg(bundle: ReportBundle) -> str:
    """Two panels per scenario: prediction function above, prior density below."""
    canvas = SvgCanvas(PANEL_WIDTH * max(1, len(bundle)), 2 * PANEL_HEIGHT)
    for column, report in enumerate(bundle):
        left = column * PANEL_WIDTH
        ts = [row.t for row in report.curve]
        winner_curve = [row.fitted[report.winner.family] for row in report.curve]
        y_max = max(max(row.observed for row in report.curve), max(winner_curve), 2 * max(ts))
        top = _Panel(left, 0, (0.0, max(ts)), (0.0, y_max))
        top.axes(canvas, "t", "t_total")
        canvas.text(left + PANEL_WIDTH / 2, 14, report.label, size=12, anchor="middle")
        canvas.polyline([top.point(0.0, 0.0), top.point(max(ts), 2 * max(ts))], stroke="#888888", dash="4,3")
        canvas.polyline(
            [top.point(t, y) for t, y in zip(ts, winner_curve)],
            stroke=FAMILY_COLORS[report.winner.family],
        )
        for row in report.curve:
            canvas.circle(*top.point(row.t, row.observed))

        xs = [x for x, _ in report.density]
        ds = [d for _, d in report.density]
        bottom = _Panel(left, PANEL_HEIGHT, (xs[0], xs[-1]), (0.0, max(ds) or 1.0))
        bottom.axes(canvas, "t_total", "P(t_total)")
        canvas.polyline(
            [bottom.point(x, d) for x, d in zip(xs, ds)],
            stroke=FAMILY_COLORS[report.winner.family],
        )
        canvas.text(
            left + PANEL_WIDTH - 8, PANEL_HEIGHT + MARGIN / 2 + 10,
            _describe(report.winner), size=10, anchor="end",
        )
    return canvas.render()


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label) or "dataset"


def write_report(bundle: ReportBundle, directory: PathLike) -> List[Path]:
    """Write per-scenario CSV tables and one ``report.svg`` into directory."""
    directory = Path(directory)
    written = []
    for report in bundle:
        slug = _slug(report.label)
        written.append(atomic_write_text(directory / f"{slug}.curve.csv", curve_to_csv(report)))
        written.append(atomic_write_text(directory / f"{slug}.density.csv", density_to_csv(report)))
    written.append(atomic_write_text(directory / "report.svg", render_svg(bundle)))
    logger.info(f"Wrote report for {len(bundle)} scenario(s) to {directory}")
    return written

