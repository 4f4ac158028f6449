"""Finite ontological models: ontic spaces, epistemic states, responses.

A model is a triple (space, preparations, measurements):

  * the ontic space is an ordered list of named finite factors; its points
    are tuples of one label per factor, canonically ordered by factor
    position and then by declared label order (first factor slowest);
  * an epistemic state assigns an exact probability weight to each point,
    stored sparsely (absent means zero);
  * a response function family assigns each point a length-K outcome
    distribution, stored densely.

Validators return verdicts rather than raising, so a malformed model can
be loaded, inspected, and reported on.  The quantum side enters only
through check_born_agreement, which compares a model's predictions with
exact Born probabilities cell by cell.
"""

from __future__ import annotations

import random
from dataclasses import InitVar, dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .hilbert import MeasurementBasis, StateVector, born_probabilities
from .numerics import ONE, QSqrt2, ZERO, is_probability, qmin
from .verdicts import Verdict

Point = Tuple[str, ...]


def format_point(point: Point) -> str:
    return "(" + ",".join(point) + ")"


@dataclass(frozen=True)
class Factor:
    """One named coordinate of the ontic space, with its label order."""

    name: str
    labels: Tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        _check_token(self.name, "factor name")
        if not self.labels:
            raise ValueError(f"factor {self.name!r} has no labels")
        for label in self.labels:
            _check_token(label, f"label of factor {self.name!r}")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"factor {self.name!r} has duplicate labels")


def _check_token(token: str, what: str) -> None:
    if not token or any(c.isspace() for c in token) or any(c in "(),#" for c in token):
        raise ValueError(f"bad {what}: {token!r} (tokens must be non-empty, "
                         "without whitespace or '(', ')', ',', '#')")


@dataclass(frozen=True)
class OnticSpace:
    factors: Tuple[Factor, ...]
    _points: Tuple[Point, ...] = field(init=False, repr=False, compare=False)
    _index: Dict[Point, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise ValueError("an ontic space needs at least one factor")
        names = [f.name for f in factors]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate factor names: {names}")
        points: List[Point] = [()]
        for factor in factors:
            points = [p + (label,) for p in points for label in factor.labels]
        object.__setattr__(self, "_points", tuple(points))
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(points)})

    @property
    def points(self) -> Tuple[Point, ...]:
        """All points in canonical order (first factor varies slowest)."""
        return self._points

    @property
    def size(self) -> int:
        return len(self._points)

    @property
    def factor_names(self) -> Tuple[str, ...]:
        return tuple(f.name for f in self.factors)

    def axis(self, name: str) -> int:
        for i, factor in enumerate(self.factors):
            if factor.name == name:
                return i
        raise ValueError(f"no factor named {name!r} in space {self.factor_names}")

    def __contains__(self, point) -> bool:
        return tuple(point) in self._index

    def point_index(self, point: Point) -> int:
        try:
            return self._index[tuple(point)]
        except KeyError:
            raise ValueError(f"point {format_point(tuple(point))} is not in the space") from None

    def subspace(self, names: Sequence[str]) -> "OnticSpace":
        """The space of the named factors, kept in this space's order."""
        wanted = set(names)
        missing = wanted - set(self.factor_names)
        if missing:
            raise ValueError(f"unknown factors: {sorted(missing)}")
        kept = tuple(f for f in self.factors if f.name in wanted)
        return OnticSpace(kept)

    def project(self, point: Point, names: Sequence[str]) -> Point:
        wanted = set(names)
        return tuple(
            coord for coord, factor in zip(point, self.factors) if factor.name in wanted
        )


def _as_weight(value) -> QSqrt2:
    if isinstance(value, QSqrt2):
        return value
    return QSqrt2(value)


@dataclass(frozen=True)
class EpistemicState:
    """A sparsely stored exact distribution over the points of a space.

    Construction checks that every point belongs to the space and drops
    exact zeros; it does not insist on normalization, which is the job of
    validate_epistemic (invalid states must be representable so they can
    be reported on).
    """

    space: OnticSpace
    weights: Mapping[Point, QSqrt2]

    def __post_init__(self) -> None:
        cleaned: Dict[Point, QSqrt2] = {}
        for point, value in self.weights.items():
            point = tuple(point)
            if point not in self.space:
                raise ValueError(f"point {format_point(point)} is not in the space")
            value = _as_weight(value)
            if value:
                cleaned[point] = value
        object.__setattr__(self, "weights", cleaned)

    def weight(self, point: Point) -> QSqrt2:
        point = tuple(point)
        if point not in self.space:
            raise ValueError(f"point {format_point(point)} is not in the space")
        return self.weights.get(point, ZERO)

    def support(self) -> Tuple[Point, ...]:
        """Support points in canonical space order."""
        return tuple(p for p in self.space.points if p in self.weights)

    def total(self) -> QSqrt2:
        total = ZERO
        for value in self.weights.values():
            total = total + value
        return total


@dataclass(frozen=True)
class ResponseFunctions:
    """A dense family of outcome distributions, one per point.

    ``rows`` maps every point of the space to a K-tuple; outcome k (1-based)
    of point p is rows[p][k-1].  ``filler`` records the default value used
    for unlisted entries in the text form, so dumps round-trip; it carries
    no semantic weight once rows are dense.
    """

    space: OnticSpace
    outcome_count: int
    rows: Mapping[Point, Tuple[QSqrt2, ...]]
    filler: QSqrt2 = field(default=ZERO, compare=False)

    def __post_init__(self) -> None:
        if self.outcome_count < 1:
            raise ValueError("a measurement needs at least one outcome")
        object.__setattr__(self, "filler", _as_weight(self.filler))
        dense: Dict[Point, Tuple[QSqrt2, ...]] = {}
        for point, row in self.rows.items():
            point = tuple(point)
            if point not in self.space:
                raise ValueError(f"point {format_point(point)} is not in the space")
            row = tuple(_as_weight(v) for v in row)
            if len(row) != self.outcome_count:
                raise ValueError(
                    f"row at {format_point(point)} has {len(row)} entries, "
                    f"expected {self.outcome_count}"
                )
            dense[point] = row
        missing = [p for p in self.space.points if p not in dense]
        if missing:
            raise ValueError(
                f"rows missing for {len(missing)} points, first {format_point(missing[0])}"
            )
        object.__setattr__(self, "rows", dense)

    @classmethod
    def from_entries(
        cls,
        space: OnticSpace,
        outcome_count: int,
        entries: Mapping[Tuple[int, Point], QSqrt2],
        filler: QSqrt2 = ZERO,
    ) -> "ResponseFunctions":
        """Build dense rows from sparse (outcome, point) -> value entries.

        Unlisted entries take the filler value.  Outcomes are 1-based.
        """
        filler = _as_weight(filler)
        grid: Dict[Point, List[QSqrt2]] = {
            p: [filler] * outcome_count for p in space.points
        }
        for (k, point), value in entries.items():
            point = tuple(point)
            if point not in space:
                raise ValueError(f"point {format_point(point)} is not in the space")
            if not 1 <= k <= outcome_count:
                raise ValueError(f"outcome {k} out of range 1..{outcome_count}")
            grid[point][k - 1] = _as_weight(value)
        rows = {p: tuple(vals) for p, vals in grid.items()}
        return cls(space, outcome_count, rows, filler)

    def value(self, outcome: int, point: Point) -> QSqrt2:
        """Response probability for outcome k (1-based) at a point."""
        if not 1 <= outcome <= self.outcome_count:
            raise ValueError(f"outcome {outcome} out of range 1..{self.outcome_count}")
        point = tuple(point)
        if point not in self.space:
            raise ValueError(f"point {format_point(point)} is not in the space")
        return self.rows[point][outcome - 1]

    def row(self, point: Point) -> Tuple[QSqrt2, ...]:
        point = tuple(point)
        if point not in self.space:
            raise ValueError(f"point {format_point(point)} is not in the space")
        return self.rows[point]


@dataclass(frozen=True)
class OntologicalModel:
    space: OnticSpace
    preparations: Mapping[str, EpistemicState]
    measurements: Mapping[str, ResponseFunctions]

    def __post_init__(self) -> None:
        object.__setattr__(self, "preparations", dict(self.preparations))
        object.__setattr__(self, "measurements", dict(self.measurements))
        for label, prep in self.preparations.items():
            _check_token(label, "preparation label")
            if prep.space != self.space:
                raise ValueError(f"preparation {label!r} lives on a different space")
        for label, meas in self.measurements.items():
            _check_token(label, "measurement label")
            if meas.space != self.space:
                raise ValueError(f"measurement {label!r} lives on a different space")

    def preparation(self, label: str) -> EpistemicState:
        try:
            return self.preparations[label]
        except KeyError:
            raise ValueError(
                f"unknown preparation {label!r}; have {sorted(self.preparations)}"
            ) from None

    def measurement(self, label: str) -> ResponseFunctions:
        try:
            return self.measurements[label]
        except KeyError:
            raise ValueError(
                f"unknown measurement {label!r}; have {sorted(self.measurements)}"
            ) from None


# ---- validators ----------------------------------------------------------


def validate_epistemic(state: EpistemicState) -> Verdict:
    """Weights all in [0, 1] and summing to exactly one."""
    failures: List[str] = []
    witnesses: List[Point] = []
    for point in state.support():
        value = state.weights[point]
        if not is_probability(value):
            failures.append(f"weight {value} at {format_point(point)} is outside [0, 1]")
            witnesses.append(point)
    total = state.total()
    if total != ONE:
        failures.append(f"weights sum to {total}, deficit {ONE - total}")
    return Verdict(not failures, tuple(failures), tuple(witnesses))


def validate_responses(responses: ResponseFunctions) -> Verdict:
    """Each point's row lies in [0, 1]^K and sums to exactly one."""
    failures: List[str] = []
    witnesses: List[Point] = []
    for point in responses.space.points:
        row = responses.rows[point]
        bad = False
        for k, value in enumerate(row, start=1):
            if not is_probability(value):
                failures.append(
                    f"response for outcome {k} at {format_point(point)} is {value}, outside [0, 1]"
                )
                bad = True
        total = ZERO
        for value in row:
            total = total + value
        if total != ONE:
            failures.append(f"responses at {format_point(point)} sum to {total}, not 1")
            bad = True
        if bad:
            witnesses.append(point)
    return Verdict(not failures, tuple(failures), tuple(witnesses))


# ---- predictions ----------------------------------------------------------


def predicted_statistics(
    model: OntologicalModel, prep_label: str, meas_label: str
) -> List[QSqrt2]:
    """Law of total probability: p(k) = sum_p mu(p) * xi_k(p), exactly."""
    prep = model.preparation(prep_label)
    meas = model.measurement(meas_label)
    totals = [ZERO] * meas.outcome_count
    for point, weight in prep.weights.items():
        row = meas.rows[point]
        for i in range(meas.outcome_count):
            totals[i] = totals[i] + weight * row[i]
    return totals


@dataclass(frozen=True)
class PredictionCell:
    prep_label: str
    meas_label: str
    outcome: int  # 1-based
    predicted: QSqrt2
    target: QSqrt2

    @property
    def match(self) -> bool:
        return self.predicted == self.target


@dataclass(frozen=True)
class PredictionReport:
    cells: Tuple[PredictionCell, ...]

    @property
    def all_match(self) -> bool:
        return all(cell.match for cell in self.cells)

    @property
    def mismatches(self) -> Tuple[PredictionCell, ...]:
        return tuple(cell for cell in self.cells if not cell.match)

    def to_dict(self) -> dict:
        return {
            "all_match": self.all_match,
            "cells": [
                {
                    "prep": c.prep_label,
                    "meas": c.meas_label,
                    "outcome": c.outcome,
                    "predicted": str(c.predicted),
                    "target": str(c.target),
                    "match": c.match,
                }
                for c in self.cells
            ],
        }


def check_born_agreement(
    model: OntologicalModel,
    prep_states: Mapping[str, StateVector],
    meas_bases: Mapping[str, MeasurementBasis],
) -> PredictionReport:
    """Compare model predictions against Born probabilities, cell by cell.

    prep_states maps preparation labels to the quantum states they are
    supposed to realize; meas_bases likewise for measurements.  Every
    (preparation, measurement, outcome) cell is compared exactly.
    """
    cells: List[PredictionCell] = []
    for meas_label, basis in meas_bases.items():
        meas = model.measurement(meas_label)
        if basis.outcome_count != meas.outcome_count:
            raise ValueError(
                f"measurement {meas_label!r} has {meas.outcome_count} outcomes, "
                f"basis has {basis.outcome_count}"
            )
        for prep_label, state in prep_states.items():
            model.preparation(prep_label)
            predicted = predicted_statistics(model, prep_label, meas_label)
            targets = born_probabilities(state, basis)
            for k, (p, t) in enumerate(zip(predicted, targets), start=1):
                cells.append(PredictionCell(prep_label, meas_label, k, p, t))
    return PredictionReport(tuple(cells))


def is_psi_epistemic(
    mu: EpistemicState, nu: EpistemicState, *, states_nonorthogonal: bool
) -> Verdict:
    """Do two epistemic states for nonorthogonal quantum states overlap?

    The verdict is positive iff the caller asserts the underlying quantum
    states are nonorthogonal and the distributions share support; the
    witnesses list the shared support points.
    """
    if mu.space != nu.space:
        raise ValueError("epistemic states live on different spaces")
    shared = tuple(
        p for p in mu.support() if qmin(mu.weight(p), nu.weight(p)).sign() > 0
    )
    if not states_nonorthogonal:
        return Verdict(
            False,
            ("the underlying quantum states are orthogonal; overlap is uninformative",),
            shared,
        )
    if not shared:
        return Verdict(
            False,
            ("distributions for nonorthogonal states have disjoint supports",),
            (),
        )
    return Verdict(True, (), shared)


# ---- sampling --------------------------------------------------------------

# Each draw consumes one 64-bit dyadic u = r / 2^64 and walks the cumulative
# distribution in canonical order, selecting the first index with u < cdf.
# Comparisons against the exact cumulative weights are decided exactly, so a
# zero-probability cell can never be selected. One sample costs exactly two
# draws: point, then outcome.
_DYADIC_BITS = 64
_DYADIC_DEN = 1 << _DYADIC_BITS


class _Cdf:
    """Exact inverse-CDF sampler over a fixed list of (item, weight)."""

    def __init__(self, items: Sequence, weights: Sequence[QSqrt2]):
        self.items = list(items)
        cumulative: List[QSqrt2] = []
        running = ZERO
        for w in weights:
            running = running + w
            cumulative.append(running)
        # Fast path: when every threshold is rational, u < c reduces to an
        # integer comparison r * den < num * 2^64 with precomputed parts.
        if all(not c.irr for c in cumulative):
            self._int_thresholds = [
                (c.rat.numerator * _DYADIC_DEN, c.rat.denominator) for c in cumulative
            ]
            self._exact_thresholds = None
        else:
            self._int_thresholds = None
            self._exact_thresholds = cumulative

    def pick(self, r: int):
        if self._int_thresholds is not None:
            for item, (num, den) in zip(self.items, self._int_thresholds):
                if r * den < num:
                    return item
        else:
            u = QSqrt2(Fraction(r, _DYADIC_DEN))
            for item, c in zip(self.items, self._exact_thresholds):
                if (c - u).sign() > 0:
                    return item
        raise AssertionError("u >= 1 cannot happen for a normalized distribution")


def _substream(seed: int, worker: int) -> random.Random:
    # Worker sub-streams are keyed by the string "seed:worker"; string
    # seeding hashes via SHA-512, stable across platforms and runs.
    return random.Random(f"{seed}:{worker}")


def simulate(
    model: OntologicalModel,
    prep_label: str,
    meas_label: str,
    samples: int,
    seed: int,
    jobs: int = 1,
) -> List[int]:
    """Draw exact samples, returning outcome counts (index k-1 = outcome k).

    Reproducible bit for bit given (samples, seed, jobs): the sample count
    is split evenly across ``jobs`` worker sub-streams (worker w uses the
    generator seeded with "seed:w"), and counts are summed.
    """
    if samples < 0:
        raise ValueError("sample count must be nonnegative")
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    prep = model.preparation(prep_label)
    meas = model.measurement(meas_label)
    verdict = validate_epistemic(prep)
    if not verdict.ok:
        raise ValueError(f"preparation {prep_label!r} is invalid: {verdict.failures[0]}")
    verdict = validate_responses(meas)
    if not verdict.ok:
        raise ValueError(f"measurement {meas_label!r} is invalid: {verdict.failures[0]}")

    support = prep.support()
    point_cdf = _Cdf(support, [prep.weights[p] for p in support])
    outcome_cdfs = {p: _Cdf(range(meas.outcome_count), meas.rows[p]) for p in support}

    counts = [0] * meas.outcome_count
    base, extra = divmod(samples, jobs)
    for worker in range(jobs):
        chunk = base + (1 if worker < extra else 0)
        rng = _substream(seed, worker)
        for _ in range(chunk):
            point = point_cdf.pick(rng.getrandbits(_DYADIC_BITS))
            outcome = outcome_cdfs[point].pick(rng.getrandbits(_DYADIC_BITS))
            counts[outcome] += 1
    return counts
