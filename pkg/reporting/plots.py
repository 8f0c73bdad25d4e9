"""
2D fidelity analysis and weight-curve figures
=============================================

Plots each pair at (S_sim, D), colored by SR algorithm. Algorithms tend to
cluster in different regions of this plane. Also draws the calibrated
w_d / w_s curves over the assorted factor, and MOS against the fitted
prediction of each scoring mode (e.g. fixed averaging vs uncertainty weighting).

Figures are written as self-contained HTML with a fixed div id, so repeated
runs give identical files. SVG export needs kaleido.

Usage:
    from reporting.plots import scatter_frame, write_scatter

    frame = scatter_frame(batch.frame())
    paths = write_scatter(frame, "out/fidelity_2d", config_hash, svg=True)
"""

import logging
from pathlib import Path
from typing import List, Union

import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from utils.report_formatter import write_hashed_csv

logger = logging.getLogger(__name__)

SCATTER_COLUMNS = ["D", "S_sim", "algorithm", "scale"]
DIV_ID = "srif-figure"
PALETTE = px.colors.qualitative.Safe

LAYOUT = dict(
    height=520,
    width=720,
    plot_bgcolor="white",
    paper_bgcolor="white",
    font=dict(family="Inter, -apple-system, BlinkMacSystemFont, 'Segoe UI', sans-serif", color="#1a202c"),
    title_font=dict(size=16, color="#38b2ac"),
    xaxis=dict(gridcolor="#edf2f7", showgrid=True),
    yaxis=dict(gridcolor="#edf2f7", showgrid=True),
)


def scatter_frame(batch_frame: pd.DataFrame) -> pd.DataFrame:
    """(D, S_sim, algorithm, scale) rows in manifest order"""
    frame = batch_frame[SCATTER_COLUMNS].copy()
    frame["algorithm"] = frame["algorithm"].fillna("").astype(str).replace("", "unlabeled")
    return frame.reset_index(drop=True)


def centroids(frame: pd.DataFrame) -> pd.DataFrame:
    """Per-algorithm mean D, mean S_sim and pair count, sorted by algorithm"""
    grouped = frame.groupby("algorithm", sort=True)
    return pd.DataFrame({
        "algorithm": list(grouped.groups.keys()),
        "D_mean": grouped["D"].mean().to_numpy(),
        "S_sim_mean": grouped["S_sim"].mean().to_numpy(),
        "count": grouped.size().to_numpy(),
    })


def scatter_figure(frame: pd.DataFrame, config_hash: str) -> go.Figure:
    algorithms = sorted(frame["algorithm"].unique())
    fig = px.scatter(
        frame,
        x="S_sim",
        y="D",
        color="algorithm",
        category_orders={"algorithm": algorithms},
        color_discrete_sequence=PALETTE,
        hover_data=["scale"],
        title=f"Deterministic vs statistical fidelity (config {config_hash})",
        labels={"S_sim": "S_sim (statistical fidelity)", "D": "D (deterministic fidelity)"},
    )
    fig.update_traces(marker=dict(size=9, opacity=0.8))
    fig.update_layout(**LAYOUT, legend_title_text="SR algorithm")
    return fig


def weights_figure(curve: pd.DataFrame, config_hash: str) -> go.Figure:
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=curve["f"], y=curve["w_d"], mode="lines+markers", name="w_d (DF)"))
    fig.add_trace(go.Scatter(x=curve["f"], y=curve["w_s"], mode="lines+markers", name="w_s (SF)"))
    fig.update_layout(
        **LAYOUT,
        title=f"Uncertainty weights over the assorted factor (config {config_hash})",
        xaxis_title="assorted factor f (bin center)",
        yaxis_title="weight",
    )
    fig.update_yaxes(range=[0, 1])
    return fig


def prediction_figure(frame: pd.DataFrame, config_hash: str) -> go.Figure:
    """MOS against the logistic-mapped prediction, one color per scoring mode"""
    modes = list(dict.fromkeys(frame["mode"]))
    fig = px.scatter(
        frame,
        x="prediction",
        y="mos",
        color="mode",
        category_orders={"mode": modes},
        color_discrete_sequence=PALETTE,
        hover_data=["score"],
        title=f"MOS vs predicted quality (config {config_hash})",
        labels={"prediction": "predicted MOS (logistic of score)", "mos": "MOS"},
    )
    fig.update_traces(marker=dict(size=7, opacity=0.7))
    lo = float(min(frame["prediction"].min(), frame["mos"].min()))
    hi = float(max(frame["prediction"].max(), frame["mos"].max()))
    fig.add_trace(go.Scatter(x=[lo, hi], y=[lo, hi], mode="lines", name="ideal", line=dict(color="#a0aec0", dash="dash")))
    fig.update_layout(**LAYOUT, legend_title_text="scoring mode")
    return fig


def _write_html(fig: go.Figure, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.write_html(path, include_plotlyjs="cdn", full_html=True, div_id=DIV_ID)
    return path


def write_scatter(frame: pd.DataFrame, out_base: Union[str, Path], config_hash: str, svg: bool = False) -> List[Path]:
    """``<out>.csv``, ``<out>_centroids.csv``, ``<out>.html`` and optionally ``<out>.svg``"""
    out_base = Path(out_base)
    if out_base.suffix:
        out_base = out_base.with_suffix("")
    written = [
        write_hashed_csv(frame, out_base.with_suffix(".csv"), config_hash),
        write_hashed_csv(centroids(frame), out_base.with_name(f"{out_base.name}_centroids.csv"), config_hash),
    ]
    fig = scatter_figure(frame, config_hash)
    written.append(_write_html(fig, out_base.with_suffix(".html")))
    if svg:
        svg_path = out_base.with_suffix(".svg")
        fig.write_image(svg_path, format="svg")
        written.append(svg_path)
    logger.info(f"2D analysis for {len(frame)} pairs written to {out_base}.*")
    return written


def write_weights_plot(curve: pd.DataFrame, path: Union[str, Path], config_hash: str) -> Path:
    return _write_html(weights_figure(curve, config_hash), Path(path))


def write_prediction_plot(frame: pd.DataFrame, out_base: Union[str, Path], config_hash: str) -> List[Path]:
    """``<out>.csv`` with (mos, mode, score, prediction) rows and ``<out>.html``"""
    out_base = Path(out_base)
    if out_base.suffix:
        out_base = out_base.with_suffix("")
    written = [
        write_hashed_csv(frame, out_base.with_suffix(".csv"), config_hash),
        _write_html(prediction_figure(frame, config_hash), out_base.with_suffix(".html")),
    ]
    logger.info(f"Prediction scatter for {frame['mode'].nunique()} modes written to {out_base}.*")
    return written
