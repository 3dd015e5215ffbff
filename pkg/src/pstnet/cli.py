"""Command-line front end: basis, synthesize, simulate, fit, verify.

Exit codes: 0 on success, 2 on usage or specification errors (including
malformed input files), 3 when a fit finishes without finding any solution.
Data goes to --output or stdout; diagnostics go to stderr.  All outputs are
byte-identical across runs for identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import design, dynamics, lattice, presets, synthesis
from .fock import BasisSpec, SpecificationError, enumerate_basis, partition_two_excitation
from .operators import HermitianOperator
from .synthesis import PlanError, SpectralPlan
from .targets import TargetTransform

DEFAULT_LABEL_POOL = ("mu", "nu", "rho", "sigma", "tau")


class NoSolutionError(RuntimeError):
    """A fit completed without any accepted solution (exit code 3)."""


def _parse_state(text: str) -> tuple[tuple[int, str], ...]:
    """Parse "1,mu;2,nu" into ((1, "mu"), (2, "nu"))."""
    slots = []
    for part in text.split(";"):
        site_text, _, label = part.partition(",")
        if not label:
            raise SpecificationError(f"bad state syntax {text!r}; want site,label;...")
        slots.append((int(site_text), label.strip()))
    return tuple(slots)


def _parse_grid(text: str) -> np.ndarray:
    pieces = text.split(":")
    if len(pieces) != 3:
        raise SpecificationError(f"bad grid {text!r}; want start:stop:points")
    start, stop, points = float(pieces[0]), float(pieces[1]), int(pieces[2])
    if points < 1:
        raise SpecificationError("grid needs at least one point")
    if points == 1:
        return np.array([stop])
    return np.linspace(start, stop, points)


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit_text(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload, output: str | None) -> None:
    _emit_text(json.dumps(payload, indent=2) + "\n", output)


def _emit_series(series: dynamics.TimeSeries, args) -> None:
    if args.format == "json":
        _emit_json(series.to_json(), args.output)
    else:
        _emit_text(series.to_csv(), args.output)


def _maybe_render_figure(series: dynamics.TimeSeries, args, title: str) -> None:
    figure = getattr(args, "figure", None)
    if getattr(args, "no_figure", False):
        return
    if figure is None and args.output and getattr(args, "reproduce", None):
        stem = args.output.rsplit(".", 1)[0]
        figure = stem + ".png"
    if figure:
        from . import reports  # import deferred: matplotlib is heavy

        reports.render_time_series(series, figure, title=title)
        print(f"figure written to {figure}", file=sys.stderr)


def _basis_from_args(args) -> BasisSpec:
    if args.labels:
        labels = tuple(part.strip() for part in args.labels.split(","))
    else:
        if args.excitations > len(DEFAULT_LABEL_POOL):
            raise SpecificationError(
                f"pass --labels explicitly for {args.excitations} excitations")
        labels = DEFAULT_LABEL_POOL[:args.excitations]
    if args.content:
        content = tuple(part.strip() for part in args.content.split(","))
    elif args.all_label_assignments:
        content = None
    else:
        content = labels if len(labels) == args.excitations else None
    return BasisSpec(
        sites=args.sites,
        excitations=args.excitations,
        labels=labels,
        statistics=args.statistics,
        double_occupancy="forbidden" if args.no_double_occupancy else "allowed",
        content=content,
    )


def cmd_basis(args) -> int:
    spec = _basis_from_args(args)
    basis = enumerate_basis(spec)
    dump = basis.to_json()
    if args.partition:
        partition = partition_two_excitation(basis)
        payload = {
            "states": dump,
            "partition": {
                "less": list(partition.less),
                "equal": list(partition.equal),
                "greater": list(partition.greater),
            },
        }
        _emit_json(payload, args.output)
    else:
        _emit_json(dump, args.output)
    return 0


def _plan_from_json(data: dict) -> SpectralPlan:
    def parse_turns(key: str) -> Fraction:
        return Fraction(key)

    x = {parse_turns(k): tuple(v) for k, v in data["x"].items()}
    beta = {}
    for key, rows in (data.get("beta") or {}).items():
        beta[parse_turns(key)] = np.array(
            [[complex(re, im) for re, im in row] for row in rows])
    return SpectralPlan(tau=float(data["tau"]), x=x, beta=beta)


def _focusing_payload(variant: str, x_plus: int, x_minus: int, tau: float) -> dict:
    key = variant.replace("-", "_")
    ham = synthesis.effective_focusing_hamiltonian(x_plus, x_minus, tau, key)
    e22, j2 = synthesis.focusing_parameters(x_plus, x_minus, tau)
    if key == "boson_pair":
        source = np.array([0.0, 1.0], dtype=complex)  # |1,mu;3,mu>
        target = np.array([1.0, 0.0], dtype=complex)  # |2,mu;2,mu>
        basis_states = ["|2,mu;2,mu>", "|1,mu;3,mu>"]
    else:
        source = np.array([1.0, 0.0, 0.0], dtype=complex)  # |2,up;2,dn>
        target = np.array([0.0, 1.0, 1.0], dtype=complex) / np.sqrt(2.0)
        basis_states = ["|2,up;2,dn>", "|1,up;3,dn>", "|1,dn;3,up>"]
    probability = dynamics.transfer_fidelity(ham, source, target, tau)
    return {
        "variant": variant,
        "x_plus": x_plus,
        "x_minus": x_minus,
        "tau": tau,
        "e22": e22,
        "j2": j2,
        "basis": basis_states,
        "transfer_probability": probability,
        "hamiltonian": ham.to_json(),
    }


def cmd_synthesize(args) -> int:
    if args.reproduce == "focusing":
        payload = {
            "spin_pair": _focusing_payload("spin-pair", 1, 1, 1.0),
            "boson_pair": _focusing_payload("boson-pair", 1, 1, 1.0),
        }
        _emit_json(payload, args.output)
        return 0
    if args.variant:
        payload = _focusing_payload(args.variant, args.xplus, args.xminus, args.tau)
        _emit_json(payload, args.output)
        return 0
    if not args.target or not args.plan:
        raise SpecificationError("synthesize needs --target and --plan files "
                                 "(or --variant / --reproduce focusing)")
    target = TargetTransform.from_json(_load_json(args.target))
    plan = _plan_from_json(_load_json(args.plan))
    ham = synthesis.synthesize(target, plan)
    report = synthesis.verify_pst(ham, target, plan.tau)
    payload = {
        "hamiltonian": ham.to_json(),
        "verification": report.to_json(),
    }
    _emit_json(payload, args.output)
    return 0


def cmd_simulate(args) -> int:
    if args.reproduce in ("fig2a", "fig2b"):
        series = presets.fig2_trace(args.reproduce[-1], points=args.points)
        _emit_series(series, args)
        _maybe_render_figure(series, args, f"node occupation ({args.reproduce})")
        return 0
    if args.reproduce == "fig3":
        series = presets.fig3_trace(points=args.points)
        _emit_series(series, args)
        _maybe_render_figure(series, args, "transfer probability (fig3)")
        return 0
    if not args.model or not args.initial:
        raise SpecificationError("simulate needs --model and --initial "
                                 "(or a --reproduce preset)")
    params = lattice.ModelParams.from_json(_load_json(args.model))
    args.sites = params.sites
    spec = _basis_from_args(args)
    basis = enumerate_basis(spec)
    ham = lattice.build_hamiltonian(params, basis)
    psi0 = basis.vector(_parse_state(args.initial))
    grid = _parse_grid(args.grid)
    if args.targets:
        targets = {}
        for text in args.targets:
            label = text.replace(",", "").replace(";", "_")  # CSV-safe
            targets[label] = basis.vector(_parse_state(text))
        series = dynamics.trace_probabilities(ham, psi0, targets, grid)
    else:
        series = dynamics.occupation_trace(ham, psi0, basis, grid)
    _emit_series(series, args)
    _maybe_render_figure(series, args, "simulation")
    return 0


def cmd_fit(args) -> int:
    catalog = args.catalog
    seed = args.seed if args.seed is not None else presets.DEFAULT_SEED
    if args.reproduce == "table2-verify":
        report = design.reproduce_table2()
        _emit_json(report.to_json(), args.output)
        return 0
    if args.reproduce == "table1":
        problem = design.table1_problem(multistart=args.restarts or 200,
                                        seed=seed)
        results = design.fit_to_target(problem)
        payload = {
            "problem": problem.to_json(),
            "solutions": [r.to_json() for r in results],
            "published_rows": design.evaluate_table1(),
        }
        if catalog:
            design.append_catalog(catalog, problem, results)
        _emit_json(payload, args.output)
        if not results:
            raise NoSolutionError("no table1 fit reached the acceptance threshold")
        return 0
    if args.reproduce == "table2-refit":
        problem = design.table2_problem(multistart=args.restarts or 60,
                                        seed=seed)
        results = design.fit_to_target(problem)
        payload = {
            "problem": problem.to_json(),
            "solutions": [r.to_json() for r in results],
        }
        if catalog:
            design.append_catalog(catalog, problem, results)
        _emit_json(payload, args.output)
        if not results:
            raise NoSolutionError("no table2 refit reached the acceptance threshold")
        return 0
    if not args.problem:
        raise SpecificationError("fit needs --problem FILE or --reproduce")
    problem = design.FitProblem.from_json(_load_json(args.problem))
    if args.seed is not None:
        problem.seed = args.seed
    if args.restarts:
        problem.multistart = args.restarts
    if problem.objective == "spectrum_match":
        results = design.fit_to_spectrum(problem)
    else:
        results = design.fit_to_target(problem)
    payload = {
        "problem": problem.to_json(),
        "solutions": [r.to_json() for r in results],
    }
    if catalog:
        design.append_catalog(catalog, problem, results)
    _emit_json(payload, args.output)
    if not results:
        raise NoSolutionError("no fit result reached the acceptance threshold")
    return 0


def cmd_verify(args) -> int:
    ham = HermitianOperator.from_json(_load_json(args.hamiltonian))
    target = TargetTransform.from_json(_load_json(args.target))
    report = synthesis.verify_pst(ham, target, args.tau)
    _emit_json(report.to_json(), args.output)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", help="write data here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="csv",
                        help="time-series output format (default csv)")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default {presets.DEFAULT_SEED})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pstnet",
        description="Design, fit, and verify perfect-transfer Hamiltonians "
                    "for multi-excitation states on quantum networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_basis = sub.add_parser("basis", help="enumerate an excitation basis")
    p_basis.add_argument("--sites", type=int, required=True)
    p_basis.add_argument("--excitations", type=int, default=2)
    p_basis.add_argument("--labels", help="comma-separated internal labels")
    p_basis.add_argument("--content",
                         help="label multiset carried by the excitations")
    p_basis.add_argument("--all-label-assignments", action="store_true",
                         help="enumerate every label assignment")
    p_basis.add_argument("--statistics", choices=("boson", "fermion"),
                         default="boson")
    p_basis.add_argument("--no-double-occupancy", action="store_true",
                         help="exclude doubly occupied sites (hard core)")
    p_basis.add_argument("--partition", action="store_true",
                         help="include the two-excitation ordering partition")
    _add_common(p_basis)
    p_basis.set_defaults(func=cmd_basis)

    p_syn = sub.add_parser("synthesize",
                           help="build a transfer Hamiltonian from a plan")
    p_syn.add_argument("--target", help="target transform JSON file")
    p_syn.add_argument("--plan", help="spectral plan JSON file")
    p_syn.add_argument("--variant", choices=("spin-pair", "boson-pair"),
                       help="effective focusing Hamiltonian variant")
    p_syn.add_argument("--xplus", type=int, default=1)
    p_syn.add_argument("--xminus", type=int, default=1)
    p_syn.add_argument("--tau", type=float, default=1.0)
    p_syn.add_argument("--reproduce", choices=("focusing",),
                       help="bundled focusing demonstration")
    _add_common(p_syn)
    p_syn.set_defaults(func=cmd_synthesize)

    p_sim = sub.add_parser("simulate", help="evolve a model and trace probabilities")
    p_sim.add_argument("--model", help="model parameters JSON file")
    p_sim.add_argument("--initial", help="initial state, e.g. '1,mu;2,nu'")
    p_sim.add_argument("--targets", nargs="*",
                       help="target states to trace; default traces occupations")
    p_sim.add_argument("--grid", default="0:1:401", help="time grid start:stop:points")
    p_sim.add_argument("--points", type=int, default=401,
                       help="grid size for --reproduce presets")
    p_sim.add_argument("--excitations", type=int, default=2)
    p_sim.add_argument("--labels")
    p_sim.add_argument("--content")
    p_sim.add_argument("--all-label-assignments", action="store_true")
    p_sim.add_argument("--statistics", choices=("boson", "fermion"), default="boson")
    p_sim.add_argument("--no-double-occupancy", action="store_true", default=True)
    p_sim.add_argument("--double-occupancy", dest="no_double_occupancy",
                       action="store_false",
                       help="allow doubly occupied sites")
    p_sim.add_argument("--reproduce", choices=("fig2a", "fig2b", "fig3"),
                       help="bundled reference dynamics")
    p_sim.add_argument("--figure", help="render the series to this image file")
    p_sim.add_argument("--no-figure", action="store_true",
                       help="skip the default figure for --reproduce runs")
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_fit = sub.add_parser("fit", help="recover model parameters for a target")
    p_fit.add_argument("--problem", help="fit problem JSON file")
    p_fit.add_argument("--reproduce",
                       choices=("table1", "table2-verify", "table2-refit"),
                       help="bundled reference fits and evaluations")
    p_fit.add_argument("--restarts", type=int, default=None,
                       help="override the multistart count")
    p_fit.add_argument("--catalog", default=None,
                       help="append solved problems to this JSON-lines file")
    _add_common(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_ver = sub.add_parser("verify", help="check exp(-iH tau) against a target")
    p_ver.add_argument("--hamiltonian", required=True, help="Hamiltonian JSON file")
    p_ver.add_argument("--target", required=True, help="target transform JSON file")
    p_ver.add_argument("--tau", type=float, default=1.0)
    _add_common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoSolutionError as exc:
        print(f"pstnet: {exc}", file=sys.stderr)
        return 3
    except (SpecificationError, PlanError, ValueError, KeyError, IndexError,
            OSError, json.JSONDecodeError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"pstnet: error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
