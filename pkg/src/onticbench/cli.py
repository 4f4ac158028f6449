"""Command-line front end.

Every command maps onto one library pipeline and follows one exit-code
convention: 0 means success or verdict-true, 1 means verdict-false (an
invalid model, a Born mismatch, an infeasible synthesis, a zero overlap),
and 2 means the invocation or its input could not be used at all.  Reports
print exact values with a float approximation in parentheses; ``--format
json`` emits a schema-versioned document instead.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .independence import analyze_independence, classical_overlap
from .modelfile import (
    ModelFormatError,
    ModelValidationError,
    dumps,
    loads,
    validate_model,
)
from .numerics import QSqrt2, ZERO
from .ontology import (
    EpistemicState,
    OntologicalModel,
    check_born_agreement,
    format_point,
    predicted_statistics,
    simulate,
)
from .scenarios import (
    MARGINAL_PREP_ORDER,
    MEASUREMENT_LABEL,
    PREP_ORDER,
    SHARED_FACTOR,
    STATE_ORDER,
    build_pbr_lhv_model,
    build_pbr_quantum_scenario,
    build_toy_nlhv_model,
    forbidden_cells,
    subsystem_states,
)
from .synthesis import (
    SynthesisSpec,
    build_synthesis_lp,
    extract_responses,
    responses_to_witness,
    solve_feasibility,
    solve_min_violation,
    verify_certificate,
    FeasibilityResult,
)

SCHEMA_VERSION = 1

_BUILTINS: Dict[str, Callable[[], OntologicalModel]] = {
    "toy-nlhv": build_toy_nlhv_model,
    "pbr-lhv": build_pbr_lhv_model,
}


class _UsageError(Exception):
    pass


def fmt(value: QSqrt2) -> str:
    """Exact value with a float approximation for human eyes."""
    approx = value.to_float()
    return f"{value} (~{approx:.6g})"


def _load_any(args, lenient: bool = False) -> Tuple[OntologicalModel, str]:
    """Resolve --builtin NAME or a model file path."""
    builtin = getattr(args, "builtin", None)
    path = getattr(args, "model", None)
    if builtin and path:
        raise _UsageError("give either a model file or --builtin, not both")
    if builtin:
        return _BUILTINS[builtin](), builtin
    if not path:
        raise _UsageError("a model file or --builtin NAME is required")
    with open(path, "r", encoding="utf-8") as handle:
        model = loads(handle.read())
    if not lenient:
        for name, verdict in validate_model(model).items():
            if not verdict.ok:
                raise ModelValidationError(f"{name}: {verdict.failures[0]}")
    return model, path


def _born_pairing(model: OntologicalModel):
    """Pair model labels with the built-in quantum scenario by convention.

    Preparations nu00, nu0+, nu+0, nu++ map to the product states in the
    same order; measurement M maps to the antidistinguishing basis.
    """
    scenario = build_pbr_quantum_scenario()
    missing = [l for l in PREP_ORDER if l not in model.preparations]
    if missing or MEASUREMENT_LABEL not in model.measurements:
        raise _UsageError(
            "born-check needs preparations nu00, nu0+, nu+0, nu++ and measurement M "
            f"(missing: {missing + ([MEASUREMENT_LABEL] if MEASUREMENT_LABEL not in model.measurements else [])})"
        )
    prep_states = {
        label: scenario.product_states[name] for label, name in zip(PREP_ORDER, STATE_ORDER)
    }
    return prep_states, {MEASUREMENT_LABEL: scenario.measurement}


# ---- command handlers --------------------------------------------------------
# Each returns (exit_code, json_payload, text_lines).


def _cmd_validate(args):
    model, source = _load_any(args, lenient=True)
    verdicts = validate_model(model)
    lines = [f"model: {source}"]
    ok = True
    for name, verdict in verdicts.items():
        status = "valid" if verdict.ok else "INVALID"
        lines.append(f"  {name}: {status}")
        for failure in verdict.failures:
            lines.append(f"    {failure}")
        ok = ok and verdict.ok
    lines.append("verdict: " + ("all components valid" if ok else "model is invalid"))
    payload = {
        "model": source,
        "ok": ok,
        "components": {name: v.to_dict() for name, v in verdicts.items()},
    }
    return (0 if ok else 1), payload, lines


def _cmd_predict(args):
    model, source = _load_any(args)
    try:
        stats = predicted_statistics(model, args.prep, args.meas)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    lines = [f"model: {source}", f"preparation {args.prep}, measurement {args.meas}:"]
    for k, value in enumerate(stats, start=1):
        lines.append(f"  outcome {k}: {fmt(value)}")
    payload = {
        "model": source,
        "prep": args.prep,
        "meas": args.meas,
        "probabilities": [str(v) for v in stats],
    }
    return 0, payload, lines


def _cmd_born_check(args):
    model, source = _load_any(args)
    prep_states, meas_bases = _born_pairing(model)
    report = check_born_agreement(model, prep_states, meas_bases)
    lines = [f"model: {source}"]
    for cell in report.cells:
        mark = "ok" if cell.match else "MISMATCH"
        lines.append(
            f"  {cell.prep_label} / outcome {cell.outcome}: model {fmt(cell.predicted)}, "
            f"target {fmt(cell.target)} [{mark}]"
        )
    matched = sum(1 for c in report.cells if c.match)
    lines.append(f"agreement: {matched}/{len(report.cells)} cells")
    payload = {"model": source, **report.to_dict()}
    return (0 if report.all_match else 1), payload, lines


def _cmd_independence(args):
    model, source = _load_any(args)
    inaccessible: Tuple[str, ...] = ()
    if args.inaccessible:
        inaccessible = tuple(args.inaccessible.split(","))
    elif SHARED_FACTOR in model.space.factor_names:
        inaccessible = (SHARED_FACTOR,)
    try:
        report = analyze_independence(model.preparations, inaccessible)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    lines = [f"model: {source}", f"inaccessible factors: {list(inaccessible) or 'none'}"]
    all_local = True
    for label, state in report.states.items():
        lines.append(f"  preparation {label}:")
        lines.append(f"    preparation independence (accessible marginal): {_yn(state.prep_independent.ok)}")
        lines.append(f"    local independence: {_yn(state.locally_independent.ok)}")
        lines.append(f"    full factor independence: {_yn(state.fully_independent.ok)}")
        for verdict in (state.prep_independent, state.locally_independent, state.fully_independent):
            for failure in verdict.failures:
                lines.append(f"      {failure}")
        all_local = all_local and state.locally_independent.ok
    lines.append("  pairwise overlaps:")
    for (a, b), value in report.overlaps.items():
        lines.append(f"    {a} vs {b}: {fmt(value)}")
    lines.append(
        "verdict: " + ("all preparations locally independent" if all_local else "local independence fails")
    )
    payload = {"model": source, "inaccessible": list(inaccessible), **report.to_dict(), "ok": all_local}
    return (0 if all_local else 1), payload, lines


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _overlap_states(model: OntologicalModel, source: str, labels: Sequence[str]):
    """Look up preparations, falling back to the subsystem states for the builtin."""
    extra: Dict[str, EpistemicState] = {}
    if source == "toy-nlhv":
        extra = subsystem_states("lambda1")
    states = []
    for label in labels:
        if label in model.preparations:
            states.append(model.preparations[label])
        elif label in extra:
            states.append(extra[label])
        else:
            known = sorted(model.preparations) + sorted(extra)
            raise _UsageError(f"unknown preparation {label!r}; have {known}")
    return states


def _cmd_overlap(args):
    model, source = _load_any(args)
    labels = args.preps.split(",")
    if len(labels) != 2:
        raise _UsageError("--preps takes exactly two comma-separated labels")
    first, second = _overlap_states(model, source, labels)
    try:
        value = classical_overlap(first, second)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    lines = [f"classical overlap of {labels[0]} and {labels[1]}: {fmt(value)}"]
    payload = {
        "model": source,
        "preps": labels,
        "overlap": str(value),
        "overlap_float": value.to_float(),
    }
    return (0 if value.sign() > 0 else 1), payload, lines


def _spec_for_model(model: OntologicalModel, prep_labels: Sequence[str]) -> SynthesisSpec:
    scenario = build_pbr_quantum_scenario()
    if len(prep_labels) != len(STATE_ORDER):
        raise _UsageError(
            f"synthesis against the built-in quantum scenario needs exactly "
            f"{len(STATE_ORDER)} preparations, got {len(prep_labels)}"
        )
    preps = []
    for label in prep_labels:
        if label not in model.preparations:
            raise _UsageError(f"unknown preparation {label!r}")
        preps.append((label, model.preparations[label]))
    return SynthesisSpec(model.space, tuple(preps), 4, scenario.born_table)


def _default_prep_order(model: OntologicalModel, source: str) -> List[str]:
    if source == "toy-nlhv":
        return list(PREP_ORDER)
    if source == "pbr-lhv":
        return list(MARGINAL_PREP_ORDER)
    return sorted(model.preparations)


def _feasibility_lines(result: FeasibilityResult, lp, spec) -> List[str]:
    lines = []
    if result.feasible:
        lines.append("feasible: response functions exist")
        responses = extract_responses(spec, result.witness)
        shown = 0
        for point in spec.space.points:
            row = responses.rows[point]
            if any(v != ZERO for v in row):
                lines.append(
                    "  " + format_point(point) + ": "
                    + ", ".join(str(v) for v in row)
                )
                shown += 1
            if shown >= 8:
                lines.append("  ... (full witness in --format json)")
                break
    else:
        lines.append("infeasible: no response functions exist")
        lines.append("Farkas certificate (constraint: multiplier):")
        for cid, mult in result.certificate.items():
            lines.append(f"  {cid}: {mult}")
    return lines


def _cmd_synthesize(args):
    model, source = _load_any(args)
    prep_labels = args.preps.split(",") if args.preps else _default_prep_order(model, source)
    spec = _spec_for_model(model, prep_labels)
    lp = build_synthesis_lp(spec)
    result = solve_feasibility(lp)
    check = verify_certificate(lp, result)
    lines = [
        f"model: {source}",
        f"LP: {len(lp.variables)} variables, {len(lp.constraints)} constraints",
    ]
    lines += _feasibility_lines(result, lp, spec)
    lines.append(f"verification: {'passed' if check.ok else 'FAILED'}")
    payload = {
        "model": source,
        "preps": prep_labels,
        "variables": len(lp.variables),
        "constraints": len(lp.constraints),
        "verified": check.ok,
        **result.to_dict(),
    }
    return (0 if result.feasible else 1), payload, lines


def _cmd_nogo(args):
    model, source = _load_any(args)
    prep_labels = args.preps.split(",") if args.preps else _default_prep_order(model, source)
    spec = _spec_for_model(model, prep_labels)
    lp = build_synthesis_lp(spec)
    result = solve_feasibility(lp)
    check = verify_certificate(lp, result)
    lines = [
        f"model: {source}",
        f"question: can response functions on this space reproduce the Born table?",
        f"LP: {len(lp.variables)} variables, {len(lp.constraints)} constraints",
    ]
    payload = {
        "model": source,
        "preps": prep_labels,
        "verified": check.ok,
        **result.to_dict(),
    }
    if result.feasible:
        lines.append("answer: yes, a witness exists; no obstruction on this space")
        lines += _feasibility_lines(result, lp, spec)
        lines.append(f"verification: {'passed' if check.ok else 'FAILED'}")
        return 1, payload, lines
    lines.append("answer: no; infeasibility certified")
    lines += _feasibility_lines(result, lp, spec)
    lines.append(f"certificate verification: {'passed' if check.ok else 'FAILED'}")
    floor = solve_min_violation(spec, forbidden_cells(tuple(prep_labels)))
    lines.append(
        "smallest achievable probability cap on the antidistinguished cells: "
        + fmt(floor.value)
    )
    payload["min_violation"] = str(floor.value)
    ok = (not result.feasible) and check.ok
    return (0 if ok else 1), payload, lines


def _cmd_simulate(args):
    model, source = _load_any(args)
    try:
        counts = simulate(model, args.prep, args.meas, args.samples, args.seed, args.jobs)
        predicted = predicted_statistics(model, args.prep, args.meas)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    total = sum(counts) or 1
    lines = [
        f"model: {source}",
        f"{args.samples} samples of ({args.prep}, {args.meas}), seed {args.seed}, jobs {args.jobs}:",
    ]
    for k, (count, target) in enumerate(zip(counts, predicted), start=1):
        lines.append(
            f"  outcome {k}: {count:>8} ({count / total:.5f} observed, {fmt(target)} predicted)"
        )
    payload = {
        "model": source,
        "prep": args.prep,
        "meas": args.meas,
        "samples": args.samples,
        "seed": args.seed,
        "jobs": args.jobs,
        "counts": counts,
        "predicted": [str(v) for v in predicted],
    }
    return 0, payload, lines


def _cmd_demo(args):
    scenario = build_pbr_quantum_scenario()
    lines: List[str] = []
    ok = True
    payload: Dict[str, object] = {}

    lines.append("Born probabilities of the antidistinguishing measurement")
    lines.append("  (rows: preparations 00, 0+, +0, ++; columns: outcomes 1..4)")
    for name, row in zip(STATE_ORDER, scenario.born_table):
        lines.append(f"    {name}:  " + "  ".join(f"{str(v):>4}" for v in row))
    diag_zero = all(scenario.born_table[i][i] == ZERO for i in range(4))
    ok = ok and diag_zero
    lines.append(f"  diagonal exactly zero: {_yn(diag_zero)}")
    payload["born_table"] = [[str(v) for v in row] for row in scenario.born_table]

    model = build_toy_nlhv_model()
    prep_states = {
        label: scenario.product_states[name] for label, name in zip(PREP_ORDER, STATE_ORDER)
    }
    report = check_born_agreement(model, prep_states, {MEASUREMENT_LABEL: scenario.measurement})
    matched = sum(1 for c in report.cells if c.match)
    lines.append("")
    lines.append("Relational coin model vs quantum predictions")
    lines.append(f"  exact agreement: {matched}/{len(report.cells)} cells")
    ok = ok and report.all_match
    payload["agreement_cells"] = f"{matched}/{len(report.cells)}"

    ind = analyze_independence(model.preparations, (SHARED_FACTOR,))
    lines.append("")
    lines.append("Independence structure (shared factor inaccessible)")
    for label, state in ind.states.items():
        lines.append(
            f"  {label}: local {_yn(state.locally_independent.ok)}, "
            f"full {_yn(state.fully_independent.ok)}"
        )
    all_local = all(s.locally_independent.ok for s in ind.states.values())
    ok = ok and all_local
    payload["independence"] = ind.to_dict()

    subs = subsystem_states("lambda1")
    base_overlap = classical_overlap(subs["nu0"], subs["nu+"])
    lines.append("")
    lines.append("Epistemic overlaps")
    lines.append(f"  nu0 vs nu+: {fmt(base_overlap)}")
    for (a, b), value in ind.overlaps.items():
        lines.append(f"  {a} vs {b}: {fmt(value)}")
    payload["overlap_nu0_nu+"] = str(base_overlap)
    payload["overlaps"] = {f"{a}|{b}": str(v) for (a, b), v in ind.overlaps.items()}

    lhv_model = build_pbr_lhv_model()
    lhv_spec = _spec_for_model(lhv_model, list(MARGINAL_PREP_ORDER))
    lhv_lp = build_synthesis_lp(lhv_spec)
    lhv_result = solve_feasibility(lhv_lp)
    lhv_check = verify_certificate(lhv_lp, lhv_result)
    floor = solve_min_violation(lhv_spec, forbidden_cells(MARGINAL_PREP_ORDER))
    lines.append("")
    lines.append("Local-variable obstruction (16-point product space)")
    lines.append(f"  synthesis feasible: {_yn(lhv_result.feasible)}")
    lines.append(f"  Farkas certificate verified: {_yn(lhv_check.ok)}")
    lines.append(f"  smallest achievable cap on forbidden cells: {fmt(floor.value)}")
    nogo_ok = (not lhv_result.feasible) and lhv_check.ok
    ok = ok and nogo_ok
    payload["lhv"] = {
        "feasible": lhv_result.feasible,
        "certificate_verified": lhv_check.ok,
        "certificate": {cid: str(v) for cid, v in (lhv_result.certificate or {}).items()},
        "min_violation": str(floor.value),
    }

    toy_spec = _spec_for_model(model, list(PREP_ORDER))
    toy_lp = build_synthesis_lp(toy_spec)
    toy_result = solve_feasibility(toy_lp)
    tables_witness = responses_to_witness(toy_spec, model.measurements[MEASUREMENT_LABEL])
    tables_check = verify_certificate(
        toy_lp, FeasibilityResult(True, witness=tables_witness)
    )
    lines.append("")
    lines.append("Relational circumvention (32-point space with shared factor)")
    lines.append(f"  synthesis feasible: {_yn(toy_result.feasible)}")
    lines.append(f"  built-in response tables verified as a witness: {_yn(tables_check.ok)}")
    ok = ok and toy_result.feasible and tables_check.ok
    payload["relational"] = {
        "feasible": toy_result.feasible,
        "tables_are_witness": tables_check.ok,
    }

    lines.append("")
    lines.append("overall: " + ("all checks passed" if ok else "CHECKS FAILED"))
    payload["ok"] = ok
    return (0 if ok else 1), payload, lines


# ---- parser -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onticbench",
        description="Exact-arithmetic workbench for finite ontological models.",
    )
    sub = parser.add_subparsers(dest="command")

    fmt_parent = argparse.ArgumentParser(add_help=False)
    fmt_parent.add_argument("--format", choices=("text", "json"), default="text")

    model_parent = argparse.ArgumentParser(add_help=False)
    model_parent.add_argument("model", nargs="?", help="path to a model file")
    model_parent.add_argument(
        "--builtin", choices=sorted(_BUILTINS), help="use a built-in model instead of a file"
    )

    p = sub.add_parser("validate", parents=[fmt_parent, model_parent],
                       help="check normalization and bounds of every component")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("predict", parents=[fmt_parent, model_parent],
                       help="exact outcome distribution of one (preparation, measurement) pair")
    p.add_argument("--prep", required=True)
    p.add_argument("--meas", required=True)
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("born-check", parents=[fmt_parent, model_parent],
                       help="compare model predictions with the built-in quantum scenario")
    p.set_defaults(handler=_cmd_born_check)

    p = sub.add_parser("independence", parents=[fmt_parent, model_parent],
                       help="preparation/local/full independence and pairwise overlaps")
    p.add_argument("--inaccessible", help="comma-separated factor names to marginalize out")
    p.set_defaults(handler=_cmd_independence)

    p = sub.add_parser("overlap", parents=[fmt_parent, model_parent],
                       help="classical overlap of two preparations")
    p.add_argument("--preps", required=True, help="two comma-separated preparation labels")
    p.set_defaults(handler=_cmd_overlap)

    p = sub.add_parser("synthesize", parents=[fmt_parent, model_parent],
                       help="solve for response functions reproducing the Born table")
    p.add_argument("--preps", help="comma-separated preparation labels, in Born-row order")
    p.set_defaults(handler=_cmd_synthesize)

    p = sub.add_parser("nogo", parents=[fmt_parent, model_parent],
                       help="certify whether Born-reproducing response functions are impossible")
    p.add_argument("--preps", help="comma-separated preparation labels, in Born-row order")
    p.set_defaults(handler=_cmd_nogo)

    p = sub.add_parser("simulate", parents=[fmt_parent, model_parent],
                       help="draw exact seeded samples and compare frequencies")
    p.add_argument("--prep", required=True)
    p.add_argument("--meas", required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("demo-pbr", parents=[fmt_parent],
                       help="full walkthrough: Born table, agreement, independence, no-go")
    p.set_defaults(handler=_cmd_demo)

    return parser


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    if not getattr(args, "handler", None):
        parser.print_help()
        return 2
    try:
        code, payload, lines = args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ModelFormatError, ModelValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        document = {"schema_version": SCHEMA_VERSION, "command": args.command}
        document.update(payload)
        print(json.dumps(document, indent=2, sort_keys=False))
    else:
        for line in lines:
            print(line)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
