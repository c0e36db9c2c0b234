"""Command-line front end.

Subcommands:
  analyze     criterion sweep: rho estimate, curvature extremes, margin grid
  verify      run every registered verification check, write the report
  extend      export a triangulated surface mesh (OBJ)
  dilatation  sample the space extension's measured dilatation
  planar      sample the planar extension on an annular grid

Exit codes: 0 pass/warn, 1 a guaranteed check failed, 2 input error.
Outputs are byte-deterministic for a fixed configuration and seed unless
--timing is requested.
"""

from __future__ import annotations

import argparse
import math
import os
import random
import sys
import time
from dataclasses import dataclass

from . import analysis as an
from . import figures, reporting, suite
from .extension import planar_extend
from .geometry import is_infinite
from .maps import (GridSpec, MapSpec, condition_value, curvature,
                   estimate_rho, load_map_spec, parse_builtin_token)
from .suite import SCHEMA_VERSION


class InputError(ValueError):
    pass


def resolve_map(token: str) -> MapSpec:
    if token.endswith(".json") or os.path.exists(token):
        try:
            return load_map_spec(token)
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"cannot load map spec {token!r}: {exc}") from exc
    try:
        return parse_builtin_token(token)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def parse_grid(text: str, r_max: float) -> GridSpec:
    try:
        nr, na = text.lower().split("x")
        return GridSpec(int(nr), int(na), r_max)
    except ValueError as exc:
        raise InputError(f"bad --grid {text!r}; expected NRxNA") from exc


@dataclass(frozen=True)
class RunConfig:
    """One resolved run: map source, grid, sampling and output options.

    Every run is deterministic given the seed; wall-clock timing is only
    recorded on request because it breaks byte determinism.
    """

    map_source: str
    grid: GridSpec
    samples: int
    seed: int
    tol_scale: float
    out_dir: str
    figures: bool
    timing: bool
    surface: str = "sigma"
    t: float = 0.0

    def __post_init__(self):
        if self.samples < 1:
            raise InputError("--samples must be >= 1")
        if self.tol_scale <= 0:
            raise InputError("--tol-scale must be positive")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            map_source=args.map,
            grid=parse_grid(args.grid, args.rmax),
            samples=args.samples,
            seed=args.seed,
            tol_scale=args.tol_scale,
            out_dir=args.out,
            figures=not args.no_figures,
            timing=args.timing,
            surface=getattr(args, "surface", "sigma"),
            t=getattr(args, "t", 0.0),
        )

    def path(self, name: str) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qclift",
        description="Space extensions of harmonic-map lifts and their "
                    "numerical verification suite.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--map", required=True,
                       help="map-spec JSON path or builtin token "
                            "(e.g. identity, alpha_power:alpha=0.7071)")
        p.add_argument("--grid", default="64x256", metavar="NRxNA",
                       help="polar grid radii x angles (default 64x256)")
        p.add_argument("--rmax", type=float, default=0.999,
                       help="outermost grid radius (default 0.999)")
        p.add_argument("--samples", type=int, default=200,
                       help="per-check sample budget (default 200)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol-scale", type=float, default=1.0,
                       help="multiplies check tolerances")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering")
        p.add_argument("--timing", action="store_true",
                       help="include wall-clock timing in the report "
                            "(breaks byte determinism)")

    common(sub.add_parser("analyze", help="criterion sweep and rho estimate"))
    common(sub.add_parser("verify", help="full verification suite"))
    p_ext = sub.add_parser("extend", help="export a surface mesh")
    common(p_ext)
    p_ext.add_argument("--surface", choices=reporting.SURFACE_KINDS,
                       default="sigma",
                       help="sigma: lifted disk; sigma-star: its reflection; "
                            "shell: the domain sphere at flow time t; "
                            "sphere-image: the extension's image of it")
    p_ext.add_argument("--t", type=float, default=0.0,
                       help="flow parameter for shell/sphere-image")
    common(sub.add_parser("dilatation", help="sample extension dilatation"))
    common(sub.add_parser("planar", help="sample the planar extension"))
    return parser


def cmd_analyze(cfg: RunConfig, spec: MapSpec) -> int:
    grid = cfg.grid
    started = time.perf_counter()
    rows = []
    values = []
    k_min = math.inf
    k_max = -math.inf
    rho = 0.0
    for z in grid.points():
        sample = condition_value(spec, z)
        k_val = curvature(spec, z)
        k_min = min(k_min, k_val)
        k_max = max(k_max, k_val)
        rho = max(rho, sample.n_value)
        rows.append((z.real, z.imag, sample.n_value, 1.0 - sample.n_value))
        if z != 0:
            values.append(sample.n_value)
    reporting.write_csv(cfg.path("condition_grid.csv"),
                        ("z_re", "z_im", "n_value", "margin"), rows)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "map": {"name": spec.name, "params": spec.params},
        "grid": {"n_radii": grid.n_radii, "n_angles": grid.n_angles,
                 "r_max": grid.r_max},
        "rho_estimate": rho,
        "condition_violated": rho >= 1.0,
        "curvature_min": k_min,
        "curvature_max": k_max,
    }
    if cfg.timing:
        payload["timing_seconds"] = time.perf_counter() - started
    reporting.write_json(cfg.path("analysis.json"), payload)
    if cfg.figures:
        figures.condition_heatmap(cfg.path("condition_margin.png"),
                                  grid, values, rho)
    print(f"rho_estimate = {rho:.9g}"
          + ("  [condition violated]" if rho >= 1.0 else ""))
    return 0


def cmd_verify(cfg: RunConfig, spec: MapSpec) -> int:
    grid = cfg.grid
    started = time.perf_counter()
    report = suite.run_verification(spec, grid, seed=cfg.seed,
                                    scale=cfg.samples / 200.0,
                                    tol_scale=cfg.tol_scale)
    if cfg.timing:
        report.timing_seconds = time.perf_counter() - started
    reporting.write_json(cfg.path("verification.json"), report.to_json())
    reporting.write_csv(cfg.path("checks.csv"),
                        ("name", "anchor", "margin", "status"),
                        [(c.name, c.anchor, c.margin, c.status)
                         for c in report.checks])
    if cfg.figures:
        figures.margins_bar(cfg.path("margins.png"), report.checks)
    for c in report.checks:
        print(f"{c.status:>15}  {c.name:<26} margin={c.margin:.3g}"
              + (f"  ({c.note})" if c.note else ""))
    if report.condition_violated:
        print("warning: criterion violated (rho >= 1); "
              "hypothesis-dependent checks reported but not asserted",
              file=sys.stderr)
    return 1 if report.failed else 0


def cmd_extend(cfg: RunConfig, spec: MapSpec) -> int:
    grid = cfg.grid
    if cfg.surface in ("sigma-star", "sphere-image"):
        rho = estimate_rho(spec, grid)
        if rho >= 1.0:
            print(f"warning: criterion violated (rho = {rho:.4g} >= 1); "
                  "the requested surface is not guaranteed to embed",
                  file=sys.stderr)
    vertices, faces, dropped = reporting.build_surface_mesh(
        spec, cfg.surface, grid, t=cfg.t)
    stem = cfg.surface.replace("-", "_")
    reporting.write_obj(cfg.path(f"{stem}.obj"), vertices, faces,
                        name=stem)
    reporting.write_json(cfg.path(f"{stem}_info.json"), {
        "schema_version": SCHEMA_VERSION,
        "map": {"name": spec.name, "params": spec.params},
        "surface": cfg.surface,
        "t": cfg.t,
        "vertices": len(vertices),
        "faces": len(faces),
        "dropped_infinite": dropped,
    })
    if cfg.figures:
        figures.mesh_figure(cfg.path(f"{stem}.png"), vertices, faces)
    print(f"{cfg.surface}: {len(vertices)} vertices, {len(faces)} faces, "
          f"{dropped} dropped at infinity")
    return 0


def cmd_dilatation(cfg: RunConfig, spec: MapSpec) -> int:
    from .extension import extend as space_extend
    grid = cfg.grid
    rho = estimate_rho(spec, grid)
    if rho >= 1.0:
        print("warning: criterion violated (rho >= 1); no bound is claimed",
              file=sys.stderr)
        bound = math.inf
    else:
        bound = (an.qc_constants(rho, analytic=True).k if spec.is_analytic
                 else an.qc_constants(rho).k)
    rng = random.Random(cfg.seed)
    fn = lambda p: space_extend(spec, p)
    rows = []
    ratios = []
    excluded = 0
    for p in suite.sample_space_points(rng, cfg.samples):
        sample = an.measured_dilatation(fn, p)
        rows.append((p.x1, p.x2, p.x3,
                     sample.ratio if not sample.ill_conditioned else math.nan,
                     int(sample.ill_conditioned)))
        if sample.ill_conditioned:
            excluded += 1
        else:
            ratios.append(sample.ratio)
    reporting.write_csv(cfg.path("dilatation.csv"),
                        ("p1", "p2", "p3", "ratio", "excluded"), rows)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "map": {"name": spec.name, "params": spec.params},
        "rho_estimate": rho,
        "bound": bound if math.isfinite(bound) else None,
        "samples": cfg.samples,
        "excluded": excluded,
        "max_ratio": max(ratios) if ratios else None,
        "mean_ratio": sum(ratios) / len(ratios) if ratios else None,
    }
    reporting.write_json(cfg.path("dilatation.json"), summary)
    if cfg.figures:
        figures.dilatation_hist(cfg.path("dilatation_hist.png"),
                                ratios, bound if math.isfinite(bound) else 0.0)
    if ratios:
        print(f"max dilatation {max(ratios):.6g} over {len(ratios)} samples "
              f"({excluded} excluded), bound {bound:.6g}")
    return 0


def cmd_planar(cfg: RunConfig, spec: MapSpec) -> int:
    grid = cfg.grid
    rho = estimate_rho(spec, grid)
    omega = an.omega_bound_check(spec, min(rho, 1.0 - 1e-12), grid)
    if not omega.passed:
        print(f"warning: sup sqrt|omega| = {omega.sup_sqrt_omega:.4g} >= "
              f"threshold {omega.threshold:.4g}; graph property not guaranteed",
              file=sys.stderr)
    n_r = max(grid.n_radii // 4, 4)
    n_a = max(grid.n_angles // 4, 16)
    radii = [0.80 + (1.25 - 0.80) * i / (n_r - 1) for i in range(n_r)]
    rows = []
    dropped = 0
    dil_max = 1.0
    dil_sum = 0.0
    dil_n = 0
    for r in radii:
        for j in range(n_a):
            z = r * complex(math.cos(2 * math.pi * j / n_a),
                            math.sin(2 * math.pi * j / n_a))
            F = planar_extend(spec, z)
            if is_infinite(F):
                dropped += 1
                continue
            side = "inside" if abs(z) <= 1.0 else "outside"
            rows.append((z.real, z.imag, F.real, F.imag, side))
            if abs(z) > 1.01:
                ratio = an.measured_planar_dilatation(
                    lambda w: planar_extend(spec, w), z)
                if math.isfinite(ratio):
                    dil_max = max(dil_max, ratio)
                    dil_sum += ratio
                    dil_n += 1
    # boundary jump in the spherical normalization (the shrink statement for
    # the reflection is a spherical-metric fact; Euclidean jumps blow up
    # wherever the map itself does near the boundary)
    continuity = 0.0
    for j in range(64):
        theta = 2 * math.pi * j / 64
        z_in = 0.999 * complex(math.cos(theta), math.sin(theta))
        z_out = 1.001 * complex(math.cos(theta), math.sin(theta))
        f_in = planar_extend(spec, z_in)
        f_out = planar_extend(spec, z_out)
        if is_infinite(f_in) or is_infinite(f_out):
            dropped += 1
            continue
        scale = math.sqrt((1 + abs(f_in) ** 2) * (1 + abs(f_out) ** 2))
        continuity = max(continuity, abs(f_out - f_in) / scale)
    reporting.write_csv(cfg.path("planar_grid.csv"),
                        ("z_re", "z_im", "F_re", "F_im", "side"), rows)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "map": {"name": spec.name, "params": spec.params},
        "rho_estimate": rho,
        "omega_sup_sqrt": omega.sup_sqrt_omega,
        "omega_threshold": omega.threshold,
        "poles_dropped": dropped,
        "exterior_dilatation_max": dil_max if dil_n else None,
        "exterior_dilatation_mean": dil_sum / dil_n if dil_n else None,
        "boundary_jump_max": continuity,
        "boundary_continuity_ok": continuity <= 0.01,
    }
    reporting.write_json(cfg.path("planar.json"), summary)
    if cfg.figures:
        figures.planar_map_figure(cfg.path("planar_map.png"), rows)
    print(f"spherical boundary jump {continuity:.4g}; "
          f"exterior dilatation max "
          f"{dil_max if dil_n else float('nan'):.6g}")
    return 0


_COMMANDS = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "extend": cmd_extend,
    "dilatation": cmd_dilatation,
    "planar": cmd_planar,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        spec = resolve_map(cfg.map_source)
        return _COMMANDS[args.command](cfg, spec)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
