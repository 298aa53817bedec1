"""Desk-scale figure data for two-parameter families in Mat(2, C) + C.

Emits CSV point clouds and companion PNG renderings:

* the family surface sampled on a polar grid of natural parameters,
* the mean value set boundary from a support-function sweep (the support
  value in a direction is the top spectral value of that direction),
* the divergence-closure boundary from limits along parameter rays,
* for the Staffelberg family, the norm-closure extra segment that the
  divergence closure misses except for its top end, with the entropy
  distance of each sample.

Coordinates are the two mean values plus the weight of the scalar block,
which separates the sheets visually.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .algebra import HermElem, State, hs_inner
from .expfam import ExpFamilySpec, e_geodesic_limit, gibbs_state, mean_value
from .families import SIGMA2, qubit_plus_bit, staffelberg, swallow
from .maxent import entropy_distance
from .serialize import write_csv
from .spectral import max_projection

FAMILIES = {"staffelberg": staffelberg, "swallow": swallow}


@dataclass(frozen=True)
class FigureTables:
    surface: list[list]
    boundary: list[list]
    closure: list[list]
    segment: list[list]

    SURFACE_HEADER = ["ray", "radius", "xi1", "xi2", "scalar_weight"]
    BOUNDARY_HEADER = ["angle", "support_value", "xi1", "xi2", "face_rank"]
    CLOSURE_HEADER = ["angle", "xi1", "xi2", "scalar_weight", "rank_profile"]
    SEGMENT_HEADER = ["t", "xi1", "xi2", "scalar_weight", "entropy_distance"]


def _scalar_weight(spec: ExpFamilySpec, rho: State) -> float:
    weight = rho.elem.data[-1]
    return float(np.trace(weight).real)


def family_tables(spec: ExpFamilySpec, grid: int, *, with_segment: bool) -> FigureTables:
    """Sample the surface, boundary sweep, closure limits and extra segment."""
    surface = []
    radii = np.linspace(0.0, 4.0, grid)
    rays = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    for a in rays:
        direction = spec.combination([math.cos(a), math.sin(a)])
        for r in radii:
            rho = gibbs_state(spec.theta0 + float(r) * direction)
            xi = mean_value(rho, spec)
            surface.append([a, r, xi.coords[0], xi.coords[1], _scalar_weight(spec, rho)])

    boundary = []
    angles = np.linspace(0.0, 2 * np.pi, 4 * grid, endpoint=False)
    for a in angles:
        u = spec.combination([math.cos(a), math.sin(a)])
        lam, p = max_projection(u)
        omega = (1.0 / p.rank) * p.elem
        boundary.append(
            [
                a,
                lam,
                hs_inner(spec.directions[0], omega),
                hs_inner(spec.directions[1], omega),
                p.rank,
            ]
        )

    closure = []
    for a in angles:
        u = spec.combination([math.cos(a), math.sin(a)])
        limit, comp = e_geodesic_limit(spec.theta0, u)
        xi = mean_value(limit, spec)
        closure.append(
            [
                a,
                xi.coords[0],
                xi.coords[1],
                _scalar_weight(spec, limit),
                "+".join(str(r) for r in comp.target.blocks),
            ]
        )

    segment = []
    if with_segment:
        segment = staffelberg_segment(spec, grid)
    return FigureTables(surface, boundary, closure, segment)


def staffelberg_segment(spec: ExpFamilySpec, grid: int) -> list[list]:
    """The missing upright segment: t * (1 + sigma2)/2 + (1 - t) on the bit.

    Every segment state projects to the mean values (0, 1); only the t = 1/2
    end lies in the divergence closure, so the entropy distance vanishes
    there and is positive elsewhere.
    """
    alg = qubit_plus_bit()
    rows = []
    for t in np.linspace(0.5, 1.0, grid):
        block = 0.5 * float(t) * (np.eye(2, dtype=complex) + SIGMA2)
        rho = State(
            HermElem(alg, [block, np.array([[1.0 - float(t)]], dtype=complex)])
        )
        xi = mean_value(rho, spec)
        d = float(entropy_distance(spec, rho))
        rows.append([float(t), xi.coords[0], xi.coords[1], 1.0 - float(t), d])
    return rows


def write_figure_outputs(name: str, tables: FigureTables, outdir: str) -> list[str]:
    """Write the CSV tables and a PNG overview; returns the file paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for label, header, rows in [
        ("surface", FigureTables.SURFACE_HEADER, tables.surface),
        ("boundary", FigureTables.BOUNDARY_HEADER, tables.boundary),
        ("clri", FigureTables.CLOSURE_HEADER, tables.closure),
        ("segment", FigureTables.SEGMENT_HEADER, tables.segment),
    ]:
        if not rows:
            continue
        path = os.path.join(outdir, f"{name}_{label}.csv")
        write_csv(path, header, rows)
        paths.append(path)
    paths.append(_render_png(name, tables, outdir))
    return paths


def _render_png(name: str, tables: FigureTables, outdir: str) -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 5))
    surf = np.array([[r[2], r[3], r[4]] for r in tables.surface])
    sc = ax1.scatter(surf[:, 0], surf[:, 1], c=surf[:, 2], s=4, cmap="viridis")
    fig.colorbar(sc, ax=ax1, label="scalar block weight")
    bnd = np.array([[r[2], r[3]] for r in tables.boundary])
    ax1.plot(bnd[:, 0], bnd[:, 1], ".", color="crimson", ms=2, label="mean value boundary")
    clo = np.array([[r[1], r[2]] for r in tables.closure])
    ax1.plot(clo[:, 0], clo[:, 1], ".", color="black", ms=3, label="closure limits")
    ax1.set_xlabel("mean value 1")
    ax1.set_ylabel("mean value 2")
    ax1.set_title(f"{name}: family and boundaries")
    ax1.legend(loc="lower left", fontsize=8)
    ax1.set_aspect("equal")

    if tables.segment:
        seg = np.array([[r[0], r[4]] for r in tables.segment])
        ax2.plot(seg[:, 0], seg[:, 1], "-o", ms=3)
        ax2.set_xlabel("segment parameter t")
        ax2.set_ylabel("entropy distance")
        ax2.set_title("norm-closure segment distances")
    else:
        ang = np.array([[r[0], r[2], r[3]] for r in tables.boundary])
        ax2.plot(ang[:, 0], ang[:, 1], label="xi1")
        ax2.plot(ang[:, 0], ang[:, 2], label="xi2")
        ax2.set_xlabel("sweep angle")
        ax2.set_ylabel("exposed point coordinates")
        ax2.set_title("support sweep (kinks mark non-exposed points)")
        ax2.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(outdir, f"{name}_overview.png")
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
