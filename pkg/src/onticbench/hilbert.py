"""Exact finite-dimensional state vectors and Born probabilities.

Amplitudes are complex numbers whose real and imaginary parts live in
Q(sqrt2), which is enough to express qubit states built from the
computational and Hadamard bases and their tensor products.  Inner
products, norms, and outcome probabilities all come out exactly: a state
is normalized iff its norm squared equals one as a field element.

Conventions:
  * tensor products are row-major: the first factor varies slowest,
    so (a (x) b)[i*dim_b + j] = a[i] * b[j];
  * inner products are conjugate-linear in the first argument;
  * measurement outcomes are indexed 1..K in reports, matching the
    positional order of the basis vectors.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Iterable, List, Sequence, Tuple

from .numerics import ONE, QSqrt2, ZERO, INV_SQRT2
from .verdicts import Verdict


def _as_qsqrt2(value) -> QSqrt2:
    if isinstance(value, QSqrt2):
        return value
    return QSqrt2(value)  # rejects floats


@dataclass(frozen=True)
class Amplitude:
    """A complex amplitude re + im*i with components in Q(sqrt2)."""

    re: QSqrt2 = ZERO
    im: QSqrt2 = ZERO

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", _as_qsqrt2(self.re))
        object.__setattr__(self, "im", _as_qsqrt2(self.im))

    def __add__(self, other: "Amplitude") -> "Amplitude":
        return Amplitude(self.re + other.re, self.im + other.im)

    def __neg__(self) -> "Amplitude":
        return Amplitude(-self.re, -self.im)

    def __mul__(self, other: "Amplitude") -> "Amplitude":
        return Amplitude(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conjugate(self) -> "Amplitude":
        return Amplitude(self.re, -self.im)

    def abs_squared(self) -> QSqrt2:
        return self.re * self.re + self.im * self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        return f"({self.re}) + ({self.im})i"


AMP_ZERO = Amplitude()
AMP_ONE = Amplitude(ONE)


@dataclass(frozen=True)
class StateVector:
    """A pure state as a tuple of exact amplitudes.

    Normalization (norm squared exactly one) is checked at construction;
    pass ``validate=False`` to build intermediate or deliberately broken
    vectors, e.g. when exercising the checkers.
    """

    amplitudes: Tuple[Amplitude, ...]
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        amps = tuple(
            a if isinstance(a, Amplitude) else Amplitude(a) for a in self.amplitudes
        )
        if not amps:
            raise ValueError("a state vector needs at least one amplitude")
        object.__setattr__(self, "amplitudes", amps)
        if validate and self.norm_squared() != ONE:
            raise ValueError(f"state vector is not normalized: |psi|^2 = {self.norm_squared()}")

    @property
    def dim(self) -> int:
        return len(self.amplitudes)

    def norm_squared(self) -> QSqrt2:
        total = ZERO
        for a in self.amplitudes:
            total = total + a.abs_squared()
        return total

    def is_normalized(self) -> bool:
        return self.norm_squared() == ONE


@dataclass(frozen=True)
class MeasurementBasis:
    """An orthonormal basis listed in outcome order (outcome k = vector k-1).

    With ``validate=True`` construction insists the vectors form a complete
    orthonormal basis; ``validate=False`` defers to check_orthonormal.
    """

    outcomes: Tuple[StateVector, ...]
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        vecs = tuple(self.outcomes)
        if not vecs:
            raise ValueError("a measurement basis needs at least one outcome vector")
        dim = vecs[0].dim
        if any(v.dim != dim for v in vecs):
            raise ValueError("all basis vectors must share one dimension")
        object.__setattr__(self, "outcomes", vecs)
        if validate:
            if len(vecs) != dim:
                raise ValueError(f"{len(vecs)} vectors cannot be a complete basis in dimension {dim}")
            verdict = check_orthonormal(self)
            if not verdict.ok:
                raise ValueError("; ".join(verdict.failures))

    @property
    def dim(self) -> int:
        return self.outcomes[0].dim

    @property
    def outcome_count(self) -> int:
        return len(self.outcomes)


def inner_product(first: StateVector, second: StateVector) -> Amplitude:
    """<first|second>, conjugate-linear in the first argument."""
    if first.dim != second.dim:
        raise ValueError(f"dimension mismatch: {first.dim} vs {second.dim}")
    total = AMP_ZERO
    for a, b in zip(first.amplitudes, second.amplitudes):
        total = total + a.conjugate() * b
    return total


def tensor_product(first: StateVector, second: StateVector) -> StateVector:
    amps = [a * b for a in first.amplitudes for b in second.amplitudes]
    return StateVector(tuple(amps), validate=False)


def born_probabilities(state: StateVector, basis: MeasurementBasis) -> List[QSqrt2]:
    """The outcome distribution (|<xi_k|psi>|^2) for k = 1..K."""
    if state.dim != basis.dim:
        raise ValueError(f"dimension mismatch: state {state.dim}, basis {basis.dim}")
    return [inner_product(vec, state).abs_squared() for vec in basis.outcomes]


def check_orthonormal(basis: MeasurementBasis) -> Verdict:
    """Check <xi_i|xi_j> = delta_ij exactly, listing every failing pair."""
    failures: List[str] = []
    witnesses: List[Tuple[int, int]] = []
    vecs = basis.outcomes
    for i in range(len(vecs)):
        for j in range(i, len(vecs)):
            ip = inner_product(vecs[i], vecs[j])
            expected = AMP_ONE if i == j else AMP_ZERO
            if ip.re != expected.re or ip.im != expected.im:
                failures.append(f"<xi_{i + 1}|xi_{j + 1}> = {ip}, expected {expected}")
                witnesses.append((i + 1, j + 1))
    return Verdict(not failures, tuple(failures), tuple(witnesses))


_NAMED_KETS = {
    "0": (AMP_ONE, AMP_ZERO),
    "1": (AMP_ZERO, AMP_ONE),
    "+": (Amplitude(INV_SQRT2), Amplitude(INV_SQRT2)),
    "-": (Amplitude(INV_SQRT2), Amplitude(-INV_SQRT2)),
}


def ket(name: str) -> StateVector:
    """One of the named qubit states "0", "1", "+", "-"."""
    try:
        return StateVector(_NAMED_KETS[name])
    except KeyError:
        raise ValueError(f"unknown ket name {name!r}; expected one of 0, 1, +, -") from None


def ket_product(names: str) -> StateVector:
    """Tensor product of named qubit states, e.g. "0+" = |0> (x) |+>."""
    if not names:
        raise ValueError("empty ket product")
    state = ket(names[0])
    for name in names[1:]:
        state = tensor_product(state, ket(name))
    return state


def format_state(state: StateVector) -> str:
    """Comma-separated amplitude list; the text form covers real states only."""
    parts = []
    for a in state.amplitudes:
        if a.im:
            raise ValueError("the text form only covers states with real amplitudes")
        parts.append(str(a.re))
    return ", ".join(parts)


def parse_state(text: str, validate: bool = True) -> StateVector:
    """Parse a named ket ("0+", "-") or a comma-separated amplitude list."""
    stripped = text.strip()
    if stripped and all(c in _NAMED_KETS for c in stripped):
        return ket_product(stripped)
    amps = tuple(Amplitude(QSqrt2.parse(part)) for part in stripped.split(","))
    return StateVector(amps, validate=validate)
