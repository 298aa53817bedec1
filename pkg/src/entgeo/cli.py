"""Command-line front end.

Subcommands: maxent | project | distance | lattice | geodesic | figures |
verify.  Inputs are JSON documents (see the package README for the wire
format); outputs are deterministic JSON with the schema tag ``entgeo/1``
and floats at 17 significant digits, or CSV plus PNG for figure data.

Exit codes: 0 success, 1 malformed input, 2 target outside the convex
support (with a separating certificate), 3 solver budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .expfam import (
    BudgetExhaustedError,
    OutsideConvexSupportError,
    e_geodesic_limit,
    free_energy,
    free_energy_asymptote,
    gibbs_state,
    mean_value,
)
from .figures import FAMILIES, family_tables, write_figure_outputs
from .lattice import LatticeBudget, enumerate_lattice
from .maxent import max_entropy, pythagoras_check, rI_projection
from .serialize import (
    SCHEMA_TAG,
    InputFormatError,
    algebra_from_json,
    algebra_to_json,
    dumps_canonical,
    element_from_json,
    element_to_json,
    ext_real_to_json,
    family_from_json,
    state_from_json,
    validate_input,
)
from .spectral import max_projection

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_OUTSIDE = 2
EXIT_BUDGET = 3


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read input: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputFormatError("input must be a JSON object")
    validate_input(doc)
    return doc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text + "\n")


def _family_of(doc: dict):
    algebra = algebra_from_json(doc["algebra"])
    if "family" in doc:
        return algebra, family_from_json(algebra, doc["family"])
    if "u" in doc:
        return algebra, family_from_json(algebra, {"directions": doc["u"]})
    raise InputFormatError("input needs a 'family' or a 'u' list")


def cmd_maxent(args) -> int:
    doc = _load(args.input)
    algebra, spec = _family_of(doc)
    if "xi" not in doc:
        raise InputFormatError("maxent needs target mean values 'xi'")
    xi = [float(x) for x in doc["xi"]]
    if len(xi) != spec.k:
        raise InputFormatError(f"expected {spec.k} mean values, got {len(xi)}")
    try:
        res = max_entropy(spec, xi)
    except OutsideConvexSupportError as exc:
        _write(
            args.output,
            dumps_canonical(
                {
                    "schema": SCHEMA_TAG,
                    "command": "maxent",
                    "status": "outside-convex-support",
                    "violation": exc.violation,
                    "separating_direction": [float(c) for c in exc.coefficients],
                }
            ),
        )
        return EXIT_OUTSIDE
    except BudgetExhaustedError as exc:
        _write(
            args.output,
            dumps_canonical(
                {
                    "schema": SCHEMA_TAG,
                    "command": "maxent",
                    "status": "budget-exhausted",
                    "residual": exc.residual,
                }
            ),
        )
        return EXIT_BUDGET
    ok = res.residual <= args.tol
    out = {
        "schema": SCHEMA_TAG,
        "command": "maxent",
        "status": "ok" if ok else "budget-exhausted",
        "algebra": algebra_to_json(algebra),
        "state": element_to_json(res.rho.elem),
        "face_rank_profile": list(res.face.block_ranks()),
        "face_projection": element_to_json(res.face.elem),
        "betas": list(res.betas),
        "entropy": res.entropy,
        "free_energy_face": res.free_energy_face,
        "residual": res.residual,
    }
    _write(args.output, dumps_canonical(out))
    return EXIT_OK if ok else EXIT_BUDGET


def _project_one(spec, rho, tol: float) -> dict:
    res = rI_projection(spec, rho)
    # Pythagorean self-check against one family member
    sigma = gibbs_state(spec.theta0)
    rep = pythagoras_check(spec, rho, sigma)
    return {
        "schema": SCHEMA_TAG,
        "command": "project",
        "status": "ok" if res.residual <= tol else "budget-exhausted",
        "pi": element_to_json(res.pi.elem),
        "face_rank_profile": list(res.face.block_ranks()),
        "parameters": list(res.parameters),
        "distance": ext_real_to_json(res.distance),
        "residual": res.residual,
        "pythagoras_gap": rep.gap,
    }


def cmd_project(args, distance_only: bool = False) -> int:
    doc = _load(args.input)
    _, spec = _family_of(doc)
    algebra = spec.algebra
    try:
        if "states" in doc:
            lines = []
            for raw in doc["states"]:
                rho = state_from_json(algebra, raw)
                out = _project_one(spec, rho, args.tol)
                if distance_only:
                    out = {
                        "schema": SCHEMA_TAG,
                        "command": "distance",
                        "distance": out["distance"],
                        "residual": out["residual"],
                    }
                lines.append(dumps_canonical(out))
            _write(args.output, "\n".join(lines))
            return EXIT_OK
        if "state" not in doc:
            raise InputFormatError("project needs a 'state' (or 'states')")
        rho = state_from_json(algebra, doc["state"])
        out = _project_one(spec, rho, args.tol)
        ok = out["status"] != "budget-exhausted"
        if distance_only:
            out = {
                "schema": SCHEMA_TAG,
                "command": "distance",
                "distance": out["distance"],
                "residual": out["residual"],
            }
        _write(args.output, dumps_canonical(out))
        return EXIT_OK if ok else EXIT_BUDGET
    except OutsideConvexSupportError as exc:
        _write(
            args.output,
            dumps_canonical(
                {
                    "schema": SCHEMA_TAG,
                    "command": "project",
                    "status": "outside-convex-support",
                    "violation": exc.violation,
                    "separating_direction": [float(c) for c in exc.coefficients],
                }
            ),
        )
        return EXIT_OUTSIDE
    except BudgetExhaustedError as exc:
        _write(
            args.output,
            dumps_canonical(
                {
                    "schema": SCHEMA_TAG,
                    "command": "project",
                    "status": "budget-exhausted",
                    "residual": exc.residual,
                }
            ),
        )
        return EXIT_BUDGET


def cmd_distance(args) -> int:
    return cmd_project(args, distance_only=True)


def _parse_budget(raw: str | None, doc: dict) -> LatticeBudget:
    kwargs = dict(doc.get("budget", {}))
    if raw:
        for part in raw.split(","):
            if "=" in part:
                key, val = part.split("=", 1)
                kwargs[key.strip()] = float(val) if "." in val else int(val)
            else:
                kwargs["grid_per_sphere"] = int(part)
    for key in ("grid_per_sphere", "random_samples", "max_depth"):
        if key in kwargs:
            kwargs[key] = int(kwargs[key])
    return LatticeBudget(**kwargs)


def cmd_lattice(args) -> int:
    doc = _load(args.input)
    _, spec = _family_of(doc)
    budget = _parse_budget(args.budget, doc)
    nodes = enumerate_lattice(spec, budget)
    out = {
        "schema": SCHEMA_TAG,
        "command": "lattice",
        "budget": {
            "grid_per_sphere": budget.grid_per_sphere,
            "random_samples": budget.random_samples,
            "dedupe_tol": budget.dedupe_tol,
            "max_depth": budget.max_depth,
        },
        "complete": False,
        "nodes": [
            {
                "rank_profile": list(n.projection.block_ranks()),
                "projection": element_to_json(n.projection.elem),
                "depth": n.depth,
                "exposed": n.exposed,
                "witnesses": [
                    element_to_json(s.witness) for s in n.access_sequence
                ],
            }
            for n in nodes
        ],
    }
    _write(args.output, dumps_canonical(out))
    return EXIT_OK


def cmd_geodesic(args) -> int:
    doc = _load(args.input)
    algebra = algebra_from_json(doc["algebra"])
    if "theta" not in doc or "direction" not in doc:
        raise InputFormatError("geodesic needs 'theta' and 'direction'")
    theta = element_from_json(algebra, doc["theta"])
    u = element_from_json(algebra, doc["direction"])
    limit, comp = e_geodesic_limit(theta, u)
    lam_plus, _ = max_projection(u)
    out = {
        "schema": SCHEMA_TAG,
        "command": "geodesic",
        "limit_state": element_to_json(limit.elem),
        "face_rank_profile": list(comp.projection.block_ranks()),
        "top_spectral_value": lam_plus,
        "free_energy_asymptote": free_energy_asymptote(theta, u),
    }
    _write(args.output, dumps_canonical(out))
    return EXIT_OK


def cmd_figures(args) -> int:
    name = args.family
    if args.input:
        doc = _load(args.input)
        name = doc.get("family_name", name)
        if name in FAMILIES:
            spec = FAMILIES[name]()
        else:
            _, spec = _family_of(doc)
            name = name or "custom"
    elif name in FAMILIES:
        spec = FAMILIES[name]()
    else:
        print(f"unknown family {name!r}; choose from {sorted(FAMILIES)}", file=sys.stderr)
        return EXIT_BAD_INPUT
    tables = family_tables(spec, args.grid, with_segment=(name == "staffelberg"))
    paths = write_figure_outputs(name, tables, args.output or ".")
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suites

    names = args.suite or None
    try:
        results = run_suites(names, seed=args.seed)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BAD_INPUT
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}")
        for failure in res.detail.get("failures", []):
            print(f"     {failure}")
    doc = {
        "schema": SCHEMA_TAG,
        "command": "verify",
        "seed": args.seed,
        "suites": [
            {"name": r.name, "passed": r.passed} for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    if args.output:
        _write(args.output, dumps_canonical(doc))
    return EXIT_OK if all(r.passed for r in results) else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="entgeo",
        description="Information geometry on block-diagonal matrix state spaces.",
    )
    parser.add_argument("--version", action="version", version=f"entgeo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="input JSON document")
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized parts")
        p.add_argument("--tol", type=float, default=1e-9, help="residual tolerance")
        p.add_argument("--budget", default=None, help="lattice budget, e.g. grid_per_sphere=512,max_depth=4")

    p = sub.add_parser("maxent", help="maximize entropy under linear constraints")
    common(p)
    p.set_defaults(fn=cmd_maxent)

    p = sub.add_parser("project", help="divergence projection onto a family's closure")
    common(p)
    p.set_defaults(fn=cmd_project)

    p = sub.add_parser("distance", help="entropy distance from a family")
    common(p)
    p.set_defaults(fn=cmd_distance)

    p = sub.add_parser("lattice", help="enumerate the projection lattice")
    common(p)
    p.set_defaults(fn=cmd_lattice)

    p = sub.add_parser("geodesic", help="limit of a parameter ray")
    common(p)
    p.set_defaults(fn=cmd_geodesic)

    p = sub.add_parser("figures", help="emit figure CSV data and PNG renderings")
    common(p, needs_input=False)
    p.add_argument("--input", default=None, help="optional custom family JSON")
    p.add_argument("--family", default="staffelberg", help="staffelberg | swallow")
    p.add_argument("--grid", type=int, default=24, help="grid size (surface rows = grid^2)")
    p.set_defaults(fn=cmd_figures)

    p = sub.add_parser("verify", help="run the acceptance suites")
    common(p, needs_input=False)
    p.add_argument("--suite", action="append", help="run only the named suite(s)")
    p.set_defaults(fn=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OutsideConvexSupportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTSIDE
    except BudgetExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
