"""The text form of an ontological model.

A model file is line-oriented UTF-8.  Blank lines separate sections;
``#`` starts a comment that runs to the end of the line.  The header line
names the format and its schema version:

    onticbench-model 1

    space
      factor lambda1 HH HT TH TT
      factor lambda_s 1 2
    end

    preparation nu00
      (HH,HH,1) 1/4
    end

    measurement M
      outcomes 4
      filler 1/4
      1 (HH,HH,2) 1/2
    end

Points are comma-joined label tuples without spaces; probabilities use
the Q(sqrt2) text form (which never contains a comma, so the last field
may contain spaces, e.g. ``1/3 + sqrt2/7``).  A preparation lists its
nonzero weights; a measurement lists ``outcome point value`` triples for
every entry that differs from its declared filler.

dumps() is canonical: sections are ordered space, preparations (sorted by
label), measurements (sorted by label); points follow the canonical space
order, measurement entries are outcome-major; rationals are in lowest
terms.  loads(dumps(m)) reproduces the model and dumps(loads(text)) is
byte-identical for text that is already canonical.

loads() performs structural validation only (syntax, label references,
duplicates), so files describing non-normalized models load and can be
handed to the validators; load_model() additionally enforces semantic
validity and is what the non-diagnostic commands use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .numerics import ONE, QSqrt2, ZERO
from .ontology import (
    EpistemicState,
    Factor,
    OnticSpace,
    OntologicalModel,
    Point,
    ResponseFunctions,
    format_point,
    validate_epistemic,
    validate_responses,
)

FORMAT_NAME = "onticbench-model"
SCHEMA_VERSION = 1


class ModelFormatError(ValueError):
    """Structural problem in a model file, located by line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ModelValidationError(ValueError):
    """The file parsed, but the model it describes is semantically invalid."""


@dataclass
class _Line:
    number: int
    text: str  # comment-stripped, right-trimmed


def _logical_lines(text: str) -> List[_Line]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            lines.append(_Line(number, body))
    return lines


def _parse_point(token: str, space: OnticSpace, line: int, col: int) -> Point:
    if not (token.startswith("(") and token.endswith(")")):
        raise ModelFormatError(f"expected a point like (a,b), got {token!r}", line, col)
    labels = tuple(token[1:-1].split(","))
    if len(labels) != len(space.factors):
        raise ModelFormatError(
            f"point {token} has {len(labels)} coordinates, space has {len(space.factors)}",
            line,
            col,
        )
    for coord, factor in zip(labels, space.factors):
        if coord not in factor.labels:
            raise ModelFormatError(
                f"factor {factor.name!r} has no label {coord!r}", line, col
            )
    return labels


def _parse_value(text: str, line: int, col: int) -> QSqrt2:
    try:
        return QSqrt2.parse(text)
    except ValueError as exc:
        raise ModelFormatError(str(exc), line, col) from None


def loads(text: str) -> OntologicalModel:
    """Parse a model file; structural errors raise ModelFormatError."""
    lines = _logical_lines(text)
    if not lines:
        raise ModelFormatError("empty model file", 1)
    header = lines[0].text.strip().split()
    if len(header) != 2 or header[0] != FORMAT_NAME:
        raise ModelFormatError(
            f"expected header '{FORMAT_NAME} {SCHEMA_VERSION}'", lines[0].number
        )
    if header[1] != str(SCHEMA_VERSION):
        raise ModelFormatError(f"unsupported schema version {header[1]}", lines[0].number)

    space: Optional[OnticSpace] = None
    factors: List[Factor] = []
    preparations: Dict[str, EpistemicState] = {}
    measurements: Dict[str, ResponseFunctions] = {}

    i = 1
    while i < len(lines):
        line = lines[i]
        tokens = line.text.split()
        keyword = tokens[0]
        if keyword == "space":
            if len(tokens) != 1:
                raise ModelFormatError("'space' takes no arguments", line.number)
            if space is not None:
                raise ModelFormatError("duplicate space section", line.number)
            i += 1
            while i < len(lines) and lines[i].text.split() != ["end"]:
                entry = lines[i]
                parts = entry.text.split()
                if parts[0] != "factor" or len(parts) < 3:
                    raise ModelFormatError(
                        "expected 'factor NAME LABEL...' or 'end'", entry.number
                    )
                name = parts[1]
                if any(f.name == name for f in factors):
                    raise ModelFormatError(f"duplicate factor {name!r}", entry.number)
                try:
                    factors.append(Factor(name, tuple(parts[2:])))
                except ValueError as exc:
                    raise ModelFormatError(str(exc), entry.number) from None
                i += 1
            if i >= len(lines):
                raise ModelFormatError("unterminated space section", line.number)
            try:
                space = OnticSpace(tuple(factors))
            except ValueError as exc:
                raise ModelFormatError(str(exc), line.number) from None
            i += 1
        elif keyword == "preparation":
            if space is None:
                raise ModelFormatError("space section must come first", line.number)
            if len(tokens) != 2:
                raise ModelFormatError("expected 'preparation LABEL'", line.number)
            label = tokens[1]
            if label in preparations:
                raise ModelFormatError(f"duplicate preparation {label!r}", line.number)
            weights: Dict[Point, QSqrt2] = {}
            i += 1
            while i < len(lines) and lines[i].text.split() != ["end"]:
                entry = lines[i]
                stripped = entry.text.strip()
                col = len(entry.text) - len(stripped) + 1
                parts = stripped.split(None, 1)
                if len(parts) != 2:
                    raise ModelFormatError("expected 'POINT VALUE'", entry.number, col)
                point = _parse_point(parts[0], space, entry.number, col)
                if point in weights:
                    raise ModelFormatError(
                        f"duplicate point {format_point(point)}", entry.number, col
                    )
                value_col = col + len(parts[0]) + 1
                weights[point] = _parse_value(parts[1], entry.number, value_col)
                i += 1
            if i >= len(lines):
                raise ModelFormatError("unterminated preparation section", line.number)
            preparations[label] = EpistemicState(space, weights)
            i += 1
        elif keyword == "measurement":
            if space is None:
                raise ModelFormatError("space section must come first", line.number)
            if len(tokens) != 2:
                raise ModelFormatError("expected 'measurement LABEL'", line.number)
            label = tokens[1]
            if label in measurements:
                raise ModelFormatError(f"duplicate measurement {label!r}", line.number)
            outcome_count: Optional[int] = None
            filler = ZERO
            entries: Dict[Tuple[int, Point], QSqrt2] = {}
            i += 1
            while i < len(lines) and lines[i].text.split() != ["end"]:
                entry = lines[i]
                stripped = entry.text.strip()
                col = len(entry.text) - len(stripped) + 1
                parts = stripped.split(None, 2)
                if parts[0] == "outcomes":
                    if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                        raise ModelFormatError("expected 'outcomes K'", entry.number, col)
                    outcome_count = int(parts[1])
                elif parts[0] == "filler":
                    if len(parts) < 2:
                        raise ModelFormatError("expected 'filler VALUE'", entry.number, col)
                    filler = _parse_value(
                        stripped.split(None, 1)[1], entry.number, col + len("filler ")
                    )
                else:
                    if outcome_count is None:
                        raise ModelFormatError(
                            "'outcomes K' must precede entries", entry.number, col
                        )
                    if len(parts) != 3:
                        raise ModelFormatError(
                            "expected 'OUTCOME POINT VALUE'", entry.number, col
                        )
                    if not parts[0].isdigit():
                        raise ModelFormatError(
                            f"expected an outcome number, got {parts[0]!r}", entry.number, col
                        )
                    outcome = int(parts[0])
                    if not 1 <= outcome <= outcome_count:
                        raise ModelFormatError(
                            f"outcome {outcome} out of range 1..{outcome_count}",
                            entry.number,
                            col,
                        )
                    point_col = col + len(parts[0]) + 1
                    point = _parse_point(parts[1], space, entry.number, point_col)
                    if (outcome, point) in entries:
                        raise ModelFormatError(
                            f"duplicate entry for outcome {outcome} at {format_point(point)}",
                            entry.number,
                            col,
                        )
                    value_col = point_col + len(parts[1]) + 1
                    entries[(outcome, point)] = _parse_value(
                        parts[2], entry.number, value_col
                    )
                i += 1
            if i >= len(lines):
                raise ModelFormatError("unterminated measurement section", line.number)
            if outcome_count is None:
                raise ModelFormatError(
                    f"measurement {label!r} declares no outcome count", line.number
                )
            measurements[label] = ResponseFunctions.from_entries(
                space, outcome_count, entries, filler
            )
            i += 1
        else:
            raise ModelFormatError(
                f"expected 'space', 'preparation', or 'measurement', got {keyword!r}",
                line.number,
            )

    if space is None:
        raise ModelFormatError("model file has no space section", lines[-1].number)
    try:
        return OntologicalModel(space, preparations, measurements)
    except ValueError as exc:
        raise ModelFormatError(str(exc), lines[-1].number) from None


def dumps(model: OntologicalModel) -> str:
    """Render the canonical text form (see the module docstring)."""
    out: List[str] = [f"{FORMAT_NAME} {SCHEMA_VERSION}", ""]
    out.append("space")
    for factor in model.space.factors:
        out.append("  factor " + factor.name + " " + " ".join(factor.labels))
    out.append("end")
    for label in sorted(model.preparations):
        state = model.preparations[label]
        out.append("")
        out.append(f"preparation {label}")
        for point in state.support():
            out.append(f"  {format_point(point)} {state.weights[point]}")
        out.append("end")
    for label in sorted(model.measurements):
        meas = model.measurements[label]
        out.append("")
        out.append(f"measurement {label}")
        out.append(f"  outcomes {meas.outcome_count}")
        out.append(f"  filler {meas.filler}")
        for k in range(1, meas.outcome_count + 1):
            for point in meas.space.points:
                value = meas.rows[point][k - 1]
                if value != meas.filler:
                    out.append(f"  {k} {format_point(point)} {value}")
        out.append("end")
    return "\n".join(out) + "\n"


def validate_model(model: OntologicalModel) -> Dict[str, "object"]:
    """All semantic verdicts, keyed 'preparation LABEL' / 'measurement LABEL'."""
    verdicts = {}
    for label in sorted(model.preparations):
        verdicts[f"preparation {label}"] = validate_epistemic(model.preparations[label])
    for label in sorted(model.measurements):
        verdicts[f"measurement {label}"] = validate_responses(model.measurements[label])
    return verdicts


def load_model(path: str) -> OntologicalModel:
    """Read, parse, and fully validate a model file."""
    with open(path, "r", encoding="utf-8") as handle:
        model = loads(handle.read())
    for name, verdict in validate_model(model).items():
        if not verdict.ok:
            raise ModelValidationError(f"{name}: {verdict.failures[0]}")
    return model


def dump_model(model: OntologicalModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(model))
