"""Mutual-exclusivity decision procedure and brute-force oracle.

Two deterministic values of the same variable term are mutually exclusive
when their conjunction is refutable in classical logic extended with the
per-variable exclusivity axioms (distinct atoms are incompatible) and
exhaustivity axioms (some atom holds).

`exclusive` is the recursive decision procedure: index-set disjointness for
atomic terms, rectangle decomposition for pair terms and antecedent-matching
for conditional terms. `oracle_exclusive` decides the same question by
enumerating every admissible assignment of atoms to variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .errors import (
    MixedVariables,
    NonDeterministicValue,
    OracleTooLarge,
    ShapeMismatch,
)
from .syntax import (
    Arrow,
    Atom,
    AtomVal,
    AttributeSchema,
    Cond,
    Neg,
    Or,
    Pair,
    Prod,
    Value,
    VariableTerm,
    print_term,
    print_value,
    reduce_projections,
    term_atoms,
    value_atoms,
)

# ---------------------------------------------------------------------------
# Star normal form for single-variable deterministic values


@dataclass(frozen=True)
class IndexSet:
    """A generalized disjunction of atoms of one variable.

    `indices` holds 1-based positions into the variable's declared atom
    order; the set view identifies disjunctions up to associativity,
    commutativity and idempotence.
    """

    variable: str
    indices: frozenset[int]

    def __post_init__(self):
        if any(i < 1 for i in self.indices):
            raise ValueError("indices are 1-based")

    def disjoint(self, other: "IndexSet") -> bool:
        if self.variable != other.variable:
            raise MixedVariables(
                f"index sets over {self.variable!r} and {other.variable!r}"
            )
        return not (self.indices & other.indices)

    def to_value(self, schema: AttributeSchema) -> Value:
        """Rebuild a disjunction of positive atoms, in declared atom order.

        An empty index set has no ⊥-free value form; it is returned as the
        contradictory conjunction-free marker Neg of the full disjunction.
        """
        atoms = schema.atoms(self.variable)
        members = [AtomVal(atoms[i - 1]) for i in sorted(self.indices)]
        if not members:
            full = reduce(Or, (AtomVal(a) for a in atoms))
            return Neg(full)
        return reduce(Or, members)


def star_normalize(value: Value, schema: AttributeSchema) -> IndexSet:
    """Reduce a single-variable deterministic value to its atom index set.

    Atoms map to singletons, disjunction to union and negation to the
    complement within the variable's full index set; the result is a
    fixpoint of the transformation steps.
    """
    atoms = value_atoms(value)
    if not atoms:
        raise MixedVariables("value names no atomic values")
    owners = {schema.owner(a) for a in atoms}
    if len(owners) != 1:
        raise MixedVariables(f"value mixes variables {sorted(owners)}")
    variable = owners.pop()
    universe = frozenset(range(1, len(schema.atoms(variable)) + 1))

    def walk(v: Value) -> frozenset[int]:
        if isinstance(v, AtomVal):
            return frozenset({schema.atom_index(variable, v.name)})
        if isinstance(v, Or):
            return walk(v.left) | walk(v.right)
        if isinstance(v, Neg):
            return universe - walk(v.inner)
        raise NonDeterministicValue(f"{print_value(v)} is not a deterministic value")

    return IndexSet(variable, walk(value))


def atomic_exclusive(variable: str, beta: Value, delta: Value, schema: AttributeSchema) -> bool:
    """Exclusivity for one atomic variable: disjoint star normal forms."""
    b = star_normalize(beta, schema)
    d = star_normalize(delta, schema)
    if b.variable != variable or d.variable != variable:
        raise MixedVariables(
            f"values over {b.variable!r}/{d.variable!r}, expected {variable!r}"
        )
    return b.disjoint(d)


# ---------------------------------------------------------------------------
# Shape discipline


def _is_class_o(value: Value) -> bool:
    if isinstance(value, AtomVal):
        return True
    if isinstance(value, (Neg, Or)):
        parts = (value.inner,) if isinstance(value, Neg) else (value.left, value.right)
        return all(_is_class_o(p) for p in parts)
    return False


def check_shape(term: VariableTerm, value: Value, schema: AttributeSchema) -> None:
    """Reject values whose connective structure does not fit the term.

    Products belong under pair terms and conditionals under conditional
    terms; negation and disjunction are transparent.
    """
    term = reduce_projections(term)
    if isinstance(value, (Neg, Or)):
        parts = (value.inner,) if isinstance(value, Neg) else (value.left, value.right)
        for part in parts:
            check_shape(term, part, schema)
        return
    if isinstance(term, Atom):
        if not isinstance(value, AtomVal):
            raise ShapeMismatch(
                f"{print_value(value)} is not a deterministic value for {term.name!r}"
            )
        if schema.owner(value.name) != term.name:
            raise MixedVariables(
                f"{value.name!r} is not an atomic value of {term.name!r}"
            )
        return
    if isinstance(term, Pair):
        if not isinstance(value, Prod):
            raise ShapeMismatch(
                f"pair term {print_term(term)} needs a product, got {print_value(value)}"
            )
        check_shape(term.left, value.left, schema)
        check_shape(term.right, value.right, schema)
        return
    if isinstance(term, Cond):
        if not isinstance(value, Arrow):
            raise ShapeMismatch(
                f"conditional term {print_term(term)} needs a conditional, got {print_value(value)}"
            )
        check_shape(term.antecedent, value.left, schema)
        check_shape(term.consequent, value.right, schema)
        return
    raise ShapeMismatch(f"unreduced projection in term {print_term(term)}")


# ---------------------------------------------------------------------------
# Decision procedure


class _Trace:
    def __init__(self, lines: list[str] | None):
        self.lines = lines
        self.depth = 0

    def note(self, text: str) -> None:
        if self.lines is not None:
            self.lines.append("  " * self.depth + text)


def exclusive(
    term: VariableTerm,
    beta: Value,
    delta: Value,
    schema: AttributeSchema,
    trace: list[str] | None = None,
) -> bool:
    """Decide mutual exclusivity of two values of the same variable term."""
    term = reduce_projections(term)
    check_shape(term, beta, schema)
    check_shape(term, delta, schema)
    return _exclusive(term, beta, delta, schema, _Trace(trace))


def _exclusive(term, beta, delta, schema, trace) -> bool:
    trace.note(
        f"{print_term(term)}: {print_value(beta)} vs {print_value(delta)}"
    )
    trace.depth += 1
    try:
        if isinstance(term, Atom):
            result = atomic_exclusive(term.name, beta, delta, schema)
            trace.note(
                f"index sets {_star_repr(beta, schema)} vs {_star_repr(delta, schema)}"
                f" -> {'disjoint' if result else 'overlap'}"
            )
            return result
        if isinstance(term, Pair):
            return _pair_exclusive(term, beta, delta, schema, trace)
        return _cond_exclusive(term, beta, delta, schema, trace)
    finally:
        trace.depth -= 1


def _star_repr(value, schema) -> str:
    return "{" + ",".join(map(str, sorted(star_normalize(value, schema).indices))) + "}"


# Pair terms.  Every pair value is normalized to a union of rectangles
# (component-value pairs): products are rectangles, negated products expand
# to the three complementary rectangles and negated disjunctions become
# intersections of the complements.  Two values are exclusive when every
# rectangle of one is exclusive from every rectangle of the other, and two
# rectangles are exclusive when either component pair is.


def _pair_exclusive(term, beta, delta, schema, trace) -> bool:
    left_rects = _rectangles(term, beta, schema)
    right_rects = _rectangles(term, delta, schema)
    trace.note(f"{len(left_rects)} x {len(right_rects)} rectangle pairs")
    for b1, b2 in left_rects:
        for d1, d2 in right_rects:
            trace.note(
                f"rectangle {print_value(Prod(b1, b2))} vs {print_value(Prod(d1, d2))}"
            )
            trace.depth += 1
            ok = _exclusive(term.left, b1, d1, schema, trace) or _exclusive(
                term.right, b2, d2, schema, trace
            )
            trace.depth -= 1
            if not ok:
                return False
    return True


def _rectangles(term, value, schema) -> list[tuple[Value, Value]]:
    if isinstance(value, Prod):
        return [(value.left, value.right)]
    if isinstance(value, Or):
        return _rectangles(term, value.left, schema) + _rectangles(term, value.right, schema)
    if isinstance(value, Neg):
        inner = value.inner
        if isinstance(inner, Neg):
            return _rectangles(term, inner.inner, schema)
        if isinstance(inner, Prod):
            g1, g2 = inner.left, inner.right
            return [(Neg(g1), g2), (g1, Neg(g2)), (Neg(g1), Neg(g2))]
        if isinstance(inner, Or):
            left = _rectangles(term, Neg(inner.left), schema)
            right = _rectangles(term, Neg(inner.right), schema)
            out = []
            for a1, a2 in left:
                for b1, b2 in right:
                    m1 = _meet(term.left, a1, b1, schema)
                    m2 = _meet(term.right, a2, b2, schema)
                    if m1 is not None and m2 is not None:
                        out.append((m1, m2))
            return out
    raise ShapeMismatch(f"not a pair-shaped value: {print_value(value)}")


def _meet(subterm, x: Value, y: Value, schema) -> Value | None:
    """Conjunction of two component values, or None when unsatisfiable."""
    subterm = reduce_projections(subterm)
    if isinstance(subterm, Atom):
        common = star_normalize(x, schema).indices & star_normalize(y, schema).indices
        if not common:
            return None
        return IndexSet(subterm.name, frozenset(common)).to_value(schema)
    if isinstance(subterm, Pair):
        rects = []
        for a1, a2 in _rectangles(subterm, x, schema):
            for b1, b2 in _rectangles(subterm, y, schema):
                m1 = _meet(subterm.left, a1, b1, schema)
                m2 = _meet(subterm.right, a2, b2, schema)
                if m1 is not None and m2 is not None:
                    rects.append(Prod(m1, m2))
        if not rects:
            return None
        return reduce(Or, rects)
    raise ShapeMismatch(
        f"cannot intersect values of conditional term {print_term(subterm)}"
    )


# Conditional terms.  Step cases in a fixed, symmetric priority: strip
# double negations, distribute over disjunctions (every disjunct must be
# exclusive), push negation through conditionals, then negated disjunctions
# (some disjunct must be exclusive).  Base case: both sides conditionals,
# exclusive when the antecedents are equal and the consequents exclusive.


def _cond_exclusive(term, beta, delta, schema, trace) -> bool:
    for value, other, flip in ((beta, delta, False), (delta, beta, True)):
        if isinstance(value, Neg) and isinstance(value.inner, Neg):
            trace.note("strip double negation")
            stripped = value.inner.inner
            args = (other, stripped) if flip else (stripped, other)
            return _cond_exclusive(term, *args, schema, trace)
    for value, other, flip in ((beta, delta, False), (delta, beta, True)):
        if isinstance(value, Or):
            trace.note("disjunction: every disjunct must be exclusive")
            return all(
                _cond_exclusive(term, *((other, d) if flip else (d, other)), schema, trace)
                for d in (value.left, value.right)
            )
    for value, other, flip in ((beta, delta, False), (delta, beta, True)):
        if isinstance(value, Neg) and isinstance(value.inner, Arrow):
            trace.note("negated conditional: push negation into the consequent")
            pushed = Arrow(value.inner.left, Neg(value.inner.right))
            args = (other, pushed) if flip else (pushed, other)
            return _cond_exclusive(term, *args, schema, trace)
    for value, other, flip in ((beta, delta, False), (delta, beta, True)):
        if isinstance(value, Neg) and isinstance(value.inner, Or):
            trace.note("negated disjunction: some disjunct must be exclusive")
            return any(
                _cond_exclusive(term, *((other, d) if flip else (d, other)), schema, trace)
                for d in (value.inner.left, value.inner.right)
            )
    if isinstance(beta, Arrow) and isinstance(delta, Arrow):
        equal = _antecedents_equal(term.antecedent, beta.left, delta.left, schema)
        trace.note(f"antecedents {'equal' if equal else 'differ'}")
        if not equal:
            return False
        return _exclusive(term.consequent, beta.right, delta.right, schema, trace)
    raise ShapeMismatch(
        f"not conditional-shaped: {print_value(beta)} vs {print_value(delta)}"
    )


def _antecedents_equal(subterm, x: Value, y: Value, schema) -> bool:
    """Normal-form equality of the two conditional antecedents."""
    subterm = reduce_projections(subterm)
    if isinstance(subterm, Atom):
        return star_normalize(x, schema).indices == star_normalize(y, schema).indices
    if isinstance(subterm, Pair):
        return _cells(subterm, x, schema) == _cells(subterm, y, schema)
    # conditional antecedent of a nested conditional term: structural
    return x == y


def _cells(term, value, schema) -> frozenset:
    """Exact cell set of an arrow-free value, for normal-form comparison."""
    term = reduce_projections(term)
    if isinstance(term, Atom):
        return frozenset(star_normalize(value, schema).indices)
    if not isinstance(term, Pair):
        raise ShapeMismatch(f"no cell semantics for term {print_term(term)}")
    universe = frozenset(
        (a, b)
        for a in _all_cells(term.left, schema)
        for b in _all_cells(term.right, schema)
    )

    def walk(v: Value) -> frozenset:
        if isinstance(v, Prod):
            left = _cells(term.left, v.left, schema)
            right = _cells(term.right, v.right, schema)
            return frozenset((a, b) for a in left for b in right)
        if isinstance(v, Or):
            return walk(v.left) | walk(v.right)
        if isinstance(v, Neg):
            return universe - walk(v.inner)
        raise ShapeMismatch(f"not a pair-shaped value: {print_value(v)}")

    return walk(value)


def _all_cells(term, schema) -> frozenset:
    term = reduce_projections(term)
    if isinstance(term, Atom):
        return frozenset(range(1, len(schema.atoms(term.name)) + 1))
    if isinstance(term, Pair):
        return frozenset(
            (a, b)
            for a in _all_cells(term.left, schema)
            for b in _all_cells(term.right, schema)
        )
    raise ShapeMismatch(f"no cell semantics for term {print_term(term)}")


# ---------------------------------------------------------------------------
# Oracle

ORACLE_ATOM_BUDGET = 20


def oracle_exclusive(
    term: VariableTerm, beta: Value, delta: Value, schema: AttributeSchema
) -> bool:
    """Brute-force exclusivity check by assignment enumeration.

    Each involved variable is assigned exactly one atom (encoding the
    exclusivity and exhaustivity axioms) and the conjunction of the two
    values is evaluated classically, reading conditionals as material
    implication.  Conditional terms are decided through the conditional
    base case with truth-table subchecks: enumerated antecedent equality
    and enumerated consequent exclusivity.
    """
    term = reduce_projections(term)
    check_shape(term, beta, schema)
    check_shape(term, delta, schema)
    budget = sum(len(schema.atoms(v)) for v in term_atoms(term))
    if budget > ORACLE_ATOM_BUDGET:
        raise OracleTooLarge(f"{budget} atoms involved, budget {ORACLE_ATOM_BUDGET}")
    return _oracle(term, beta, delta, schema)


def _oracle(term, beta, delta, schema) -> bool:
    if isinstance(term, Cond):
        return _oracle_cond(term, beta, delta, schema)
    variables = sorted(term_atoms(term))
    for assignment in _assignments(variables, schema):
        if _sat(beta, assignment, schema) and _sat(delta, assignment, schema):
            return False
    return True


def _oracle_cond(term, beta, delta, schema) -> bool:
    for value, other in ((beta, delta), (delta, beta)):
        if isinstance(value, Neg) and isinstance(value.inner, Neg):
            return _oracle_cond(term, value.inner.inner, other, schema)
    for value, other in ((beta, delta), (delta, beta)):
        if isinstance(value, Or):
            return all(_oracle_cond(term, d, other, schema) for d in (value.left, value.right))
    for value, other in ((beta, delta), (delta, beta)):
        if isinstance(value, Neg) and isinstance(value.inner, Arrow):
            pushed = Arrow(value.inner.left, Neg(value.inner.right))
            return _oracle_cond(term, pushed, other, schema)
    for value, other in ((beta, delta), (delta, beta)):
        if isinstance(value, Neg) and isinstance(value.inner, Or):
            return any(
                _oracle_cond(term, d, other, schema)
                for d in (value.inner.left, value.inner.right)
            )
    if isinstance(beta, Arrow) and isinstance(delta, Arrow):
        if not _oracle_equal(term.antecedent, beta.left, delta.left, schema):
            return False
        return _oracle(reduce_projections(term.consequent), beta.right, delta.right, schema)
    raise ShapeMismatch(
        f"not conditional-shaped: {print_value(beta)} vs {print_value(delta)}"
    )


def _oracle_equal(subterm, x, y, schema) -> bool:
    variables = sorted(term_atoms(subterm))
    return all(
        _sat(x, assignment, schema) == _sat(y, assignment, schema)
        for assignment in _assignments(variables, schema)
    )


def _assignments(variables, schema):
    if not variables:
        yield {}
        return
    head, *rest = variables
    for tail in _assignments(rest, schema):
        for atom in schema.atoms(head):
            yield {head: atom, **tail}


def _sat(value: Value, assignment: dict, schema) -> bool:
    if isinstance(value, AtomVal):
        return assignment[schema.owner(value.name)] == value.name
    if isinstance(value, Neg):
        return not _sat(value.inner, assignment, schema)
    if isinstance(value, Or):
        return _sat(value.left, assignment, schema) or _sat(value.right, assignment, schema)
    if isinstance(value, Prod):
        return _sat(value.left, assignment, schema) and _sat(value.right, assignment, schema)
    return (not _sat(value.left, assignment, schema)) or _sat(value.right, assignment, schema)
