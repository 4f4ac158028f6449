"""Exact response-function synthesis as rational linear programming.

Given preparations mu_i on a finite ontic space and target outcome rows
t(i, k), the synthesis question is whether response functions x(k, p)
exist with

    x(k, p) >= 0,
    sum_k x(k, p) = 1                      for every point p,
    sum_p mu_i(p) * x(k, p) = t(i, k)      for every preparation and outcome.

Everything is decided in exact rational arithmetic.  Coefficients from
Q(sqrt2) are handled by splitting an equality into its 1-component and
sqrt2-component rows, which is sound because {1, sqrt2} is linearly
independent over the rationals, and solutions are sought over rational
values (probabilities produced by the solver are always rational).
Inequality rows cannot be split that way, because the field order does not
act componentwise, so the violation-minimizing program insists on rational
data; every built-in scenario satisfies that.

The solver is a two-phase primal simplex over Fractions with Bland's rule,
which cannot cycle, so termination is unconditional.  Infeasibility comes
with a Farkas certificate: row multipliers y with

    sum_i y_i * row_i <= 0 componentwise over the variables,
    y_i <= 0 for every '<=' row,
    sum_i y_i * rhs_i > 0,

which makes any nonnegative solution impossible.  Certificates and
witnesses are re-verified against the constraint list before they are
returned; verify_certificate exposes the same check to callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .numerics import ONE, QSqrt2, ZERO
from .ontology import (
    EpistemicState,
    OnticSpace,
    Point,
    ResponseFunctions,
    format_point,
)
from .verdicts import Verdict

_F0 = Fraction(0)
_F1 = Fraction(1)


@dataclass(frozen=True)
class SynthesisSpec:
    """Preparations plus target outcome rows on one ontic space.

    ``targets[i][k-1]`` is the required probability of outcome k under
    preparation i.  Rows must sum to one; pass ``validate=False`` to study
    deliberately inconsistent targets.
    """

    space: OnticSpace
    preparations: Tuple[Tuple[str, EpistemicState], ...]
    outcome_count: int
    targets: Tuple[Tuple[QSqrt2, ...], ...]

    def __init__(self, space, preparations, outcome_count, targets, validate=True):
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "preparations", tuple((l, s) for l, s in preparations))
        object.__setattr__(self, "outcome_count", int(outcome_count))
        object.__setattr__(
            self,
            "targets",
            tuple(tuple(v if isinstance(v, QSqrt2) else QSqrt2(v) for v in row) for row in targets),
        )
        if self.outcome_count < 1:
            raise ValueError("need at least one outcome")
        labels = [l for l, _ in self.preparations]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate preparation labels: {labels}")
        if len(self.targets) != len(self.preparations):
            raise ValueError("one target row per preparation required")
        for label, state in self.preparations:
            if state.space != self.space:
                raise ValueError(f"preparation {label!r} lives on a different space")
        for (label, _), row in zip(self.preparations, self.targets):
            if len(row) != self.outcome_count:
                raise ValueError(f"target row for {label!r} has wrong length")
            if validate:
                total = ZERO
                for v in row:
                    total = total + v
                if total != ONE:
                    raise ValueError(f"target row for {label!r} sums to {total}, not 1")

    def prep_index(self, label: str) -> int:
        for i, (l, _) in enumerate(self.preparations):
            if l == label:
                return i
        raise ValueError(f"unknown preparation {label!r}")

    @property
    def variable_count(self) -> int:
        return self.outcome_count * self.space.size


@dataclass(frozen=True)
class Constraint:
    cid: str
    coeffs: Tuple[Fraction, ...]
    rhs: Fraction
    kind: str  # "eq" or "le"

    def __post_init__(self) -> None:
        if self.kind not in ("eq", "le"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))


@dataclass(frozen=True)
class LPProblem:
    """A rational LP: named variables, eq/le rows, optional min objective."""

    variables: Tuple[str, ...]
    constraints: Tuple[Constraint, ...]
    objective: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n = len(self.variables)
        cids = [c.cid for c in self.constraints]
        if len(set(cids)) != len(cids):
            raise ValueError("duplicate constraint ids")
        for c in self.constraints:
            if len(c.coeffs) != n:
                raise ValueError(f"constraint {c.cid} has {len(c.coeffs)} coefficients, expected {n}")
        if self.objective is not None:
            objective = tuple(Fraction(v) for v in self.objective)
            if len(objective) != n:
                raise ValueError("objective length must match the variable count")
            object.__setattr__(self, "objective", objective)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: Optional[Tuple[Fraction, ...]] = None
    certificate: Optional[Mapping[str, Fraction]] = None
    objective_value: Optional[Fraction] = None

    def to_dict(self) -> dict:
        out: dict = {"feasible": self.feasible}
        if self.witness is not None:
            out["witness"] = [str(v) for v in self.witness]
        if self.certificate is not None:
            out["certificate"] = {cid: str(v) for cid, v in self.certificate.items()}
        if self.objective_value is not None:
            out["objective_value"] = str(self.objective_value)
        return out


def _variable_name(outcome: int, point: Point) -> str:
    return f"x{outcome}@{format_point(point)}"


def _synthesis_variables(spec: SynthesisSpec) -> Tuple[str, ...]:
    # k-major: variable (k, p) sits at index (k-1)*|points| + point_index(p).
    return tuple(
        _variable_name(k, p)
        for k in range(1, spec.outcome_count + 1)
        for p in spec.space.points
    )


def _var_index(spec: SynthesisSpec, outcome: int, point: Point) -> int:
    return (outcome - 1) * spec.space.size + spec.space.point_index(point)


def build_synthesis_lp(spec: SynthesisSpec) -> LPProblem:
    """Encode the synthesis question as a rational feasibility LP.

    Emits one normalization equality per point and, per (preparation,
    outcome) cell, the 1-component row and, when any sqrt2 component is
    present, the sqrt2-component row.  Rows that are identically 0 = 0 are
    dropped.
    """
    n = spec.variable_count
    size = spec.space.size
    constraints: List[Constraint] = []
    for p_idx, point in enumerate(spec.space.points):
        coeffs = [_F0] * n
        for k in range(spec.outcome_count):
            coeffs[k * size + p_idx] = _F1
        constraints.append(Constraint(f"norm@{format_point(point)}", tuple(coeffs), _F1, "eq"))
    for (label, prep), target_row in zip(spec.preparations, spec.targets):
        for k in range(1, spec.outcome_count + 1):
            rat = [_F0] * n
            irr = [_F0] * n
            any_irr = False
            for point, weight in prep.weights.items():
                idx = (k - 1) * size + spec.space.point_index(point)
                rat[idx] = weight.rat
                irr[idx] = weight.irr
                if weight.irr:
                    any_irr = True
            target = target_row[k - 1]
            if any(rat) or target.rat:
                constraints.append(
                    Constraint(f"born@{label}#k{k}", tuple(rat), target.rat, "eq")
                )
            if any_irr or target.irr:
                constraints.append(
                    Constraint(f"born@{label}#k{k}:irr", tuple(irr), target.irr, "eq")
                )
    return LPProblem(_synthesis_variables(spec), tuple(constraints))


# ---- exact simplex ---------------------------------------------------------


def _pivot(T: List[List[Fraction]], z: List[Fraction], basis: List[int], r: int, col: int) -> None:
    prow = T[r]
    piv = prow[col]
    if piv != _F1:
        inv = _F1 / piv
        T[r] = prow = [v * inv for v in prow]
    nonzero = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[col]
        if f:
            for j in nonzero:
                row[j] -= f * prow[j]
    f = z[col]
    if f:
        for j in nonzero:
            z[j] -= f * prow[j]
    basis[r] = col


def _bland(T: List[List[Fraction]], z: List[Fraction], basis: List[int], eligible: int) -> str:
    """Run Bland's-rule pivots to optimality. ``eligible`` bounds entering columns."""
    while True:
        enter = -1
        for j in range(eligible):
            if z[j] < 0:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best: Optional[Fraction] = None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(T, z, basis, leave, enter)


def _simplex(
    A: List[List[Fraction]], b: List[Fraction], c: Optional[List[Fraction]]
):
    """min c.x subject to Ax = b, x >= 0, in exact rational arithmetic.

    Returns ("infeasible", y) with y a Farkas certificate of the system
    (sum_i y_i A_i <= 0 componentwise and y.b > 0), or ("optimal", x, value).
    """
    m = len(A)
    n = len(A[0]) if m else 0
    width = n + m + 1

    flips = [(-_F1 if b[i] < 0 else _F1) for i in range(m)]
    T: List[List[Fraction]] = []
    for i in range(m):
        f = flips[i]
        row = [f * v for v in A[i]] + [_F0] * m + [f * b[i]]
        row[n + i] = _F1
        T.append(row)
    basis = list(range(n, n + m))

    # Phase 1: minimize the artificial total. Initial reduced costs are the
    # negated column sums; the artificial columns start at zero.
    z = [_F0] * width
    for row in T:
        for j in range(n):
            if row[j]:
                z[j] -= row[j]
        z[-1] -= row[-1]
    status = _bland(T, z, basis, n + m)
    if status != "optimal":
        raise AssertionError("phase 1 is always bounded below by zero")
    infeasibility = -z[-1]
    if infeasibility > 0:
        # Simplex multipliers: the reduced cost of artificial i is 1 - y_i.
        y = [flips[i] * (_F1 - z[n + i]) for i in range(m)]
        return ("infeasible", y)

    if c is None:
        x = [_F0] * n
        for r, var in enumerate(basis):
            if var < n:
                x[var] = T[r][-1]
        return ("optimal", x, _F0)

    # Drive artificials out of the basis; rows that cannot pivot are
    # redundant (zero in every original column, zero rhs) and are dropped.
    keep: List[int] = []
    for r in range(len(T)):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j]), None)
            if col is None:
                continue  # redundant row
            _pivot(T, z, basis, r, col)
        keep.append(r)
    T = [T[r] for r in keep]
    basis = [basis[r] for r in keep]
    if any(var >= n for var in basis):
        raise AssertionError("artificial variable left in the basis after cleanup")

    # Phase 2 with the real objective.
    z = list(c) + [_F0] * m + [_F0]
    for r, row in enumerate(T):
        cb = c[basis[r]]
        if cb:
            for j in range(width):
                if row[j]:
                    z[j] -= cb * row[j]
    status = _bland(T, z, basis, n)
    if status == "unbounded":
        raise ValueError("objective is unbounded below")
    x = [_F0] * n
    for r, var in enumerate(basis):
        x[var] = T[r][-1]
    return ("optimal", x, -z[-1])


def _standard_form(lp: LPProblem):
    """Append one slack column per '<=' row, giving Ax = b, x >= 0."""
    n0 = len(lp.variables)
    le_rows = [i for i, con in enumerate(lp.constraints) if con.kind == "le"]
    slack_of = {row: n0 + j for j, row in enumerate(le_rows)}
    n = n0 + len(le_rows)
    A: List[List[Fraction]] = []
    b: List[Fraction] = []
    for i, con in enumerate(lp.constraints):
        row = list(con.coeffs) + [_F0] * len(le_rows)
        if con.kind == "le":
            row[slack_of[i]] = _F1
        A.append(row)
        b.append(con.rhs)
    return A, b, n0


def _solve(lp: LPProblem, optimize: bool) -> FeasibilityResult:
    A, b, n0 = _standard_form(lp)
    c = None
    if optimize:
        if lp.objective is None:
            raise ValueError("LP has no objective to optimize")
        c = list(lp.objective) + [_F0] * (len(A[0]) - n0 if A else 0)
    outcome = _simplex(A, b, c)
    if outcome[0] == "infeasible":
        y = outcome[1]
        certificate = {
            lp.constraints[i].cid: y[i] for i in range(len(y)) if y[i]
        }
        result = FeasibilityResult(False, certificate=certificate)
    else:
        _, x, value = outcome
        result = FeasibilityResult(
            True,
            witness=tuple(x[:n0]),
            objective_value=value if optimize else None,
        )
    verdict = verify_certificate(lp, result)
    if not verdict.ok:
        raise AssertionError(
            "internal verification failed: " + "; ".join(verdict.failures)
        )
    return result


def solve_feasibility(lp: LPProblem) -> FeasibilityResult:
    """Decide the system exactly: witness if feasible, certificate if not.

    Whatever it returns has already passed verify_certificate.
    """
    return _solve(lp, optimize=False)


def verify_certificate(lp: LPProblem, result: FeasibilityResult) -> Verdict:
    """Re-check a witness or certificate against the constraint list.

    This is an independent pass over the stated constraints: a witness must
    satisfy every row and be nonnegative; a certificate's multipliers must
    recombine the rows into an impossibility (nonpositive combination with
    positive right-hand side, nonpositive multipliers on '<=' rows).
    """
    failures: List[str] = []
    if result.feasible:
        x = result.witness
        if x is None:
            return Verdict(False, ("feasible result carries no witness",))
        if len(x) != len(lp.variables):
            return Verdict(False, (f"witness has {len(x)} values, expected {len(lp.variables)}",))
        for j, value in enumerate(x):
            if value < 0:
                failures.append(f"variable {lp.variables[j]} is negative: {value}")
        for con in lp.constraints:
            lhs = _F0
            for coeff, value in zip(con.coeffs, x):
                if coeff:
                    lhs += coeff * value
            if con.kind == "eq" and lhs != con.rhs:
                failures.append(f"constraint {con.cid} violated: lhs {lhs}, rhs {con.rhs}")
            elif con.kind == "le" and lhs > con.rhs:
                failures.append(f"constraint {con.cid} violated: lhs {lhs} > rhs {con.rhs}")
        return Verdict(not failures, tuple(failures))

    cert = result.certificate
    if cert is None:
        return Verdict(False, ("infeasible result carries no certificate",))
    by_cid = {con.cid: con for con in lp.constraints}
    unknown = sorted(set(cert) - set(by_cid))
    if unknown:
        return Verdict(False, (f"certificate references unknown constraints: {unknown}",))
    combo = [_F0] * len(lp.variables)
    total = _F0
    for cid, mult in cert.items():
        con = by_cid[cid]
        if con.kind == "le" and mult > 0:
            failures.append(f"multiplier for '<=' row {cid} must be <= 0, got {mult}")
        if mult:
            for j, coeff in enumerate(con.coeffs):
                if coeff:
                    combo[j] += mult * coeff
            total += mult * con.rhs
    for j, value in enumerate(combo):
        if value > 0:
            failures.append(
                f"combined coefficient of {lp.variables[j]} is {value}, not <= 0"
            )
    if total <= 0:
        failures.append(f"combined right-hand side is {total}, not > 0")
    return Verdict(not failures, tuple(failures))


# ---- violation floor ---------------------------------------------------------


@dataclass(frozen=True)
class MinViolationResult:
    value: QSqrt2
    lp: LPProblem
    raw: FeasibilityResult


def build_min_violation_lp(
    spec: SynthesisSpec, forbidden: Sequence[Tuple[str, int]]
) -> LPProblem:
    """LP for the smallest achievable cap t on the forbidden cells.

    Keeps only normalization and nonnegativity, plus one row per forbidden
    (preparation, outcome) cell bounding its predicted probability by t.
    Requires rational preparation weights (field inequalities do not split
    componentwise) and zero targets on the forbidden cells.
    """
    n = spec.variable_count
    size = spec.space.size
    variables = _synthesis_variables(spec) + ("t",)
    constraints: List[Constraint] = []
    for p_idx, point in enumerate(spec.space.points):
        coeffs = [_F0] * (n + 1)
        for k in range(spec.outcome_count):
            coeffs[k * size + p_idx] = _F1
        constraints.append(Constraint(f"norm@{format_point(point)}", tuple(coeffs), _F1, "eq"))
    seen = set()
    for label, k in forbidden:
        if not 1 <= k <= spec.outcome_count:
            raise ValueError(f"outcome {k} out of range 1..{spec.outcome_count}")
        if (label, k) in seen:
            raise ValueError(f"forbidden cell ({label}, {k}) listed twice")
        seen.add((label, k))
        i = spec.prep_index(label)
        if spec.targets[i][k - 1] != ZERO:
            raise ValueError(
                f"forbidden cell ({label}, {k}) has nonzero target {spec.targets[i][k - 1]}"
            )
        prep = spec.preparations[i][1]
        coeffs = [_F0] * (n + 1)
        for point, weight in prep.weights.items():
            if weight.irr:
                raise ValueError(
                    "violation floor requires rational preparation weights; "
                    f"{label!r} has {weight} at {format_point(point)}"
                )
            coeffs[(k - 1) * size + spec.space.point_index(point)] = weight.rat
        coeffs[n] = -_F1
        constraints.append(Constraint(f"cap@{label}#k{k}", tuple(coeffs), _F0, "le"))
    objective = tuple([_F0] * n + [_F1])
    return LPProblem(variables, tuple(constraints), objective)


def solve_min_violation(
    spec: SynthesisSpec, forbidden: Sequence[Tuple[str, int]]
) -> MinViolationResult:
    lp = build_min_violation_lp(spec, forbidden)
    if not forbidden:
        zeros = tuple([_F0] * len(lp.variables))
        # No caps: any valid response family gives violation zero.
        return MinViolationResult(ZERO, lp, FeasibilityResult(True, witness=zeros, objective_value=_F0))
    result = _solve(lp, optimize=True)
    return MinViolationResult(QSqrt2(result.objective_value), lp, result)


def min_violation(spec: SynthesisSpec, forbidden: Sequence[Tuple[str, int]]) -> QSqrt2:
    """The exact optimum: how badly any response family must violate the zeros."""
    return solve_min_violation(spec, forbidden).value


# ---- bridges to response functions -------------------------------------------


def extract_responses(spec: SynthesisSpec, witness: Sequence[Fraction]) -> ResponseFunctions:
    """Turn an LP witness back into a dense response-function family."""
    n = spec.variable_count
    if len(witness) < n:
        raise ValueError(f"witness has {len(witness)} values, expected at least {n}")
    size = spec.space.size
    rows = {
        point: tuple(
            QSqrt2(Fraction(witness[k * size + p_idx]))
            for k in range(spec.outcome_count)
        )
        for p_idx, point in enumerate(spec.space.points)
    }
    return ResponseFunctions(spec.space, spec.outcome_count, rows)


def responses_to_witness(
    spec: SynthesisSpec, responses: ResponseFunctions
) -> Tuple[Fraction, ...]:
    """Flatten response functions into LP variable order (rational values only)."""
    if responses.space != spec.space:
        raise ValueError("response functions live on a different space")
    if responses.outcome_count != spec.outcome_count:
        raise ValueError("outcome count mismatch")
    values: List[Fraction] = []
    for k in range(1, spec.outcome_count + 1):
        for point in spec.space.points:
            value = responses.value(k, point)
            if value.irr:
                raise ValueError(
                    f"response value {value} at {format_point(point)} is not rational"
                )
            values.append(value.rat)
    return tuple(values)
