"""Training tables, probability estimators and applied systems.

A machine-learning system is modelled as a pair of a training table and an
estimator; applying it to a context σ and a target variable yields a full
probability distribution over the target's atoms, which downstream modules
compare and derive from.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .errors import (
    EmptySupport,
    InvariantViolation,
    ParseError,
    SchemaMismatch,
)
from .exclusivity import star_normalize
from .syntax import (
    AttributeSchema,
    Value,
    ValueAttribution,
    parse_attribution_list,
    print_attribution_list,
)

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class TrainingSet:
    """An immutable table of fully observed rows over the schema."""

    id: str
    schema: AttributeSchema
    rows: tuple[dict, ...]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class Estimator:
    """A conditional-probability estimator over a training table.

    kind "freq" is plain relative frequency; kind "laplace" adds
    `smoothing` pseudo-counts to every atom of the target variable.
    """

    id: str
    kind: str = "freq"
    smoothing: float = 1.0

    def __post_init__(self):
        if self.kind not in ("freq", "laplace"):
            raise InvariantViolation(f"unknown estimator kind {self.kind!r}")
        if self.kind == "laplace" and not self.smoothing > 0:
            raise InvariantViolation("laplace smoothing must be positive")


@dataclass(frozen=True)
class AppliedSystem:
    """A system applied to a context: the induced distribution on one variable."""

    training: str
    estimator: str
    sigma: tuple[ValueAttribution, ...]
    variable: str
    distribution: tuple[tuple[str, float], ...]

    def __post_init__(self):
        total = sum(p for _, p in self.distribution)
        if abs(total - 1.0) > _SUM_TOL:
            raise InvariantViolation(f"distribution sums to {total!r}, not 1")
        for atom, p in self.distribution:
            if not -_SUM_TOL <= p <= 1.0 + _SUM_TOL:
                raise InvariantViolation(f"probability {p!r} for {atom!r} outside [0, 1]")

    def probability(self, atom: str) -> float:
        for name, p in self.distribution:
            if name == atom:
                return p
        raise SchemaMismatch(f"{atom!r} is not in the stored distribution")

    @property
    def atoms(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.distribution)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.distribution)


def load_training_set(path, schema: AttributeSchema, id: str | None = None) -> TrainingSet:
    """Read an RFC-4180 CSV whose header names schema variables."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file, expected a header row") from None
        header = [h.strip() for h in header]
        for column in header:
            if not schema.has_variable(column):
                raise SchemaMismatch(f"header column {column!r} is not a schema variable")
        if len(set(header)) != len(header):
            raise ParseError("duplicate column in header")
        rows = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(header):
                raise ParseError(f"row {lineno}: {len(cells)} cells, expected {len(header)}")
            row = {}
            for column, cell in zip(header, cells):
                atom = cell.strip()
                if atom not in schema.atoms(column):
                    raise SchemaMismatch(
                        f"row {lineno}: {atom!r} is not an atomic value of {column!r}"
                    )
                row[column] = atom
            rows.append(row)
    name = id if id is not None else str(path)
    return TrainingSet(name, schema, tuple(rows))


def _row_satisfies(row: dict, attribution: ValueAttribution, schema: AttributeSchema) -> bool:
    # set-theoretic reading: the row's atom must lie in the value's star set
    atoms = schema.atoms(attribution.variable)
    index = atoms.index(row[attribution.variable]) + 1
    return index in star_normalize(attribution.value, schema).indices


def restrict_rows(ts: TrainingSet, sigma) -> tuple[dict, ...]:
    return tuple(
        row for row in ts.rows if all(_row_satisfies(row, va, ts.schema) for va in sigma)
    )


def conditional_distribution(
    ts: TrainingSet, est: Estimator, sigma, target: str
) -> AppliedSystem:
    """Distribution of `target` among the rows classically satisfying σ."""
    sigma = tuple(sigma)
    if any(va.variable == target for va in sigma):
        raise InvariantViolation(f"{target!r} is already attributed in sigma")
    for va in sigma:
        va.validate(ts.schema)
    atoms = ts.schema.atoms(target)
    rows = restrict_rows(ts, sigma)
    counts = {atom: 0 for atom in atoms}
    for row in rows:
        counts[row[target]] += 1
    if est.kind == "freq":
        if not rows:
            raise EmptySupport(f"no training row satisfies {print_attribution_list(sigma) or 'the empty context'}")
        total = len(rows)
        dist = tuple((atom, counts[atom] / total) for atom in atoms)
    else:
        total = len(rows) + est.smoothing * len(atoms)
        dist = tuple((atom, (counts[atom] + est.smoothing) / total) for atom in atoms)
    return AppliedSystem(ts.id, est.id, sigma, target, dist)


def independent(
    ts: TrainingSet, est: Estimator, sigma, t: str, u: str, tol: float = 1e-9
):
    """Test conditional independence of u from t given σ.

    Returns (verdict, witness) where the witness records the maximal
    deviation |P(u=υ | σ, t=τ) − P(u=υ | σ)| and where it occurs.
    """
    sigma = tuple(sigma)
    base = conditional_distribution(ts, est, sigma, u)
    worst = (0.0, None, None)
    for tau in ts.schema.atoms(t):
        extended = sigma + (ValueAttribution(t, _atom_value(tau)),)
        given = conditional_distribution(ts, est, extended, u)
        for upsilon in ts.schema.atoms(u):
            deviation = abs(given.probability(upsilon) - base.probability(upsilon))
            if deviation > worst[0]:
                worst = (deviation, tau, upsilon)
    verdict = worst[0] <= tol
    return verdict, {"max_deviation": worst[0], "t_atom": worst[1], "u_atom": worst[2]}


def _atom_value(name: str) -> Value:
    from .syntax import AtomVal

    return AtomVal(name)


def save_applied_system(system: AppliedSystem, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"system {system.training} {system.estimator}\n")
        handle.write(f"sigma {print_attribution_list(system.sigma)}\n")
        handle.write(f"var {system.variable}\n")
        for atom, p in system.distribution:
            handle.write(f"{atom} {p:.17g}\n")


def load_applied_system(path, schema: AttributeSchema | None = None) -> AppliedSystem:
    with open(path, encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]
    if len(lines) < 4:
        raise ParseError("applied-system file needs header lines and a distribution")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "system":
        raise ParseError(f"bad system line: {lines[0]!r}")
    if not lines[1].startswith("sigma"):
        raise ParseError(f"bad sigma line: {lines[1]!r}")
    sigma = parse_attribution_list(lines[1][len("sigma") :].strip(), schema)
    var_parts = lines[2].split()
    if len(var_parts) != 2 or var_parts[0] != "var":
        raise ParseError(f"bad var line: {lines[2]!r}")
    distribution = []
    for line in lines[3:]:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"bad distribution line: {line!r}")
        try:
            p = float(parts[1])
        except ValueError:
            raise ParseError(f"bad probability: {parts[1]!r}") from None
        distribution.append((parts[0], p))
    if schema is not None:
        declared = schema.atoms(var_parts[1])
        if tuple(a for a, _ in distribution) != declared:
            raise SchemaMismatch("distribution atoms do not follow the schema order")
    return AppliedSystem(head[1], head[2], sigma, var_parts[1], tuple(distribution))
