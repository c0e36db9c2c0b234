"""Figure rendering for the report path (always to files, never a GUI)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from mpl_toolkits.mplot3d.art3d import Poly3DCollection  # noqa: E402


def condition_heatmap(path, grid, values, rho_estimate) -> None:
    """Polar heatmap of the normalized criterion value over the grid."""
    radii = np.array(grid.radii())
    angles = np.array(grid.angles() + [2.0 * math.pi])
    vals = np.array(values).reshape(grid.n_radii, grid.n_angles)
    vals = np.concatenate([vals, vals[:, :1]], axis=1)
    theta, r = np.meshgrid(angles, radii)
    fig = plt.figure(figsize=(5, 4))
    ax = fig.add_subplot(111, projection="polar")
    pcm = ax.pcolormesh(theta, r, vals, shading="auto", cmap="viridis")
    fig.colorbar(pcm, ax=ax, label="criterion value")
    ax.set_title(f"criterion value, sup ≈ {rho_estimate:.4g}")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def margins_bar(path, checks) -> None:
    """Signed check margins on a symlog axis, colored by status."""
    names = [c.name for c in checks]
    margins = [c.margin if math.isfinite(c.margin) else 0.0 for c in checks]
    colors = {"pass": "tab:green", "fail": "tab:red",
              "not-guaranteed": "tab:orange"}
    fig, ax = plt.subplots(figsize=(7, 0.35 * len(names) + 1.5))
    ax.barh(range(len(names)), margins,
            color=[colors.get(c.status, "gray") for c in checks])
    ax.set_yticks(range(len(names)), names, fontsize=7)
    ax.set_xscale("symlog", linthresh=1e-10)
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_xlabel("margin (≥ 0 means satisfied)")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def dilatation_hist(path, ratios, bound) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    if ratios:
        ax.hist(ratios, bins=60, color="tab:blue", alpha=0.8)
    ax.axvline(bound, color="tab:red", ls="--", label=f"bound {bound:.3g}")
    ax.set_xlabel("measured dilatation")
    ax.set_ylabel("samples")
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def planar_map_figure(path, samples) -> None:
    """Image grid of the planar extension, inside vs outside the disk."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ins = [(s[2], s[3]) for s in samples if s[4] == "inside"]
    outs = [(s[2], s[3]) for s in samples if s[4] == "outside"]
    if ins:
        ax.plot([p[0] for p in ins], [p[1] for p in ins], ".",
                ms=1.5, color="tab:blue", label="|z| < 1")
    if outs:
        ax.plot([p[0] for p in outs], [p[1] for p in outs], ".",
                ms=1.5, color="tab:orange", label="|z| > 1")
    ax.set_aspect("equal")
    ax.legend(fontsize=8, markerscale=4)
    ax.set_title("planar extension samples")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def mesh_figure(path, vertices, faces, max_faces=4000) -> None:
    """3D rendering of a triangulated surface."""
    fig = plt.figure(figsize=(5, 4.5))
    ax = fig.add_subplot(111, projection="3d")
    if vertices and faces:
        verts = np.array(vertices)
        stride = max(1, len(faces) // max_faces)
        tris = [[verts[i] for i in f] for f in faces[::stride]]
        coll = Poly3DCollection(tris, alpha=0.55, facecolor="tab:blue",
                                edgecolor="k", linewidths=0.1)
        ax.add_collection3d(coll)
        lo = verts.min(axis=0)
        hi = verts.max(axis=0)
        span = float(max(hi - lo)) or 1.0
        mid = 0.5 * (hi + lo)
        ax.set_xlim(mid[0] - span / 2, mid[0] + span / 2)
        ax.set_ylim(mid[1] - span / 2, mid[1] + span / 2)
        ax.set_zlim(mid[2] - span / 2, mid[2] + span / 2)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
