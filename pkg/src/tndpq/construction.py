"""Logical construction and deconstruction of applied systems.

Construction builds judgments for compound values using only right
introduction rules; deconstruction recovers component judgments using only
right elimination rules.  The module also provides closure membership for
the intensionally represented relevant-value sets, the sub-value relation,
the relevance-map builder for compound targets, and the preservation
checker that runs one plan against an original system and a copy and
reports whether the chosen trust relation survives.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DerivationFailed,
    PreconditionFailed,
    RuleNotAllowed,
    TheoremDoesNotApply,
    TndpqError,
    UnsupportedTarget,
)
from .calculus import Derivation, RuleId, apply_rule, at_query
from .exclusivity import exclusive
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
    ValueAttribution,
    VariableTerm,
    print_term,
    print_value,
    reduce_projections,
)
from .systems import independent
from .trust import TrustKind, TrustReport

# Rules admissible in each mode, as (rule, direction) pairs.
RIGHT_I_RULES = frozenset(
    {
        (RuleId.ProdI1, "forward"),
        (RuleId.ProdI2, "forward"),
        (RuleId.ProdIIndep, "forward"),
        (RuleId.OrIR, "forward"),
        (RuleId.NegIER, "forward"),
        (RuleId.ImpIE, "forward"),
    }
)
RIGHT_E_RULES = frozenset(
    {
        (RuleId.ProdE1a, "forward"),
        (RuleId.ProdE1b, "forward"),
        (RuleId.ProdE2a, "forward"),
        (RuleId.ProdE2b, "forward"),
        (RuleId.OrERa, "forward"),
        (RuleId.OrERb, "forward"),
        (RuleId.NegIER, "backward"),
        (RuleId.ImpIE, "backward"),
    }
)


@dataclass(frozen=True)
class PlanStep:
    id: str
    rule: RuleId
    operands: tuple[str, ...]
    direction: str = "forward"
    side: tuple = ()


@dataclass(frozen=True)
class Plan:
    """An ordered list of rule applications over named inputs and steps."""

    steps: tuple[PlanStep, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for step in self.steps:
            if step.id in seen:
                raise RuleNotAllowed(f"duplicate step id {step.id!r}")
            seen.add(step.id)

    @property
    def result_id(self) -> str:
        return self.steps[-1].id


ConstructionPlan = Plan
DeconstructionPlan = Plan


def _execute(inputs: dict, plan: Plan, schema, allowed, mode: str) -> Derivation:
    env = dict(inputs)
    for step in plan.steps:
        if (step.rule, step.direction) not in allowed:
            raise RuleNotAllowed(
                f"{step.rule.value} ({step.direction}) is not a right "
                f"{'introduction' if mode == 'construct' else 'elimination'} rule"
            )
        try:
            premises = [env[name] for name in step.operands]
        except KeyError as exc:
            raise RuleNotAllowed(f"step {step.id!r} references unknown operand {exc}") from None
        env[step.id] = apply_rule(
            step.rule, premises, schema, side=step.side, direction=step.direction
        )
    return env[plan.result_id]


def construct(inputs: dict, plan: Plan, schema: AttributeSchema) -> Derivation:
    """Run a plan restricted to right introduction rules."""
    if not plan.steps:
        raise RuleNotAllowed("empty plan")
    return _execute(inputs, plan, schema, RIGHT_I_RULES, "construct")


def deconstruct(inputs: dict, plan: Plan, schema: AttributeSchema) -> Derivation:
    """Run a plan restricted to right elimination rules."""
    if not plan.steps:
        raise RuleNotAllowed("empty plan")
    return _execute(inputs, plan, schema, RIGHT_E_RULES, "deconstruct")


# ---------------------------------------------------------------------------
# Closures and sub-values


@dataclass(frozen=True)
class ClosureSpec:
    """Intensional closure of a value set under chosen connectives.

    Either `base` lists the generating values directly, or `product` pairs
    two component specs, generating every product of their members.
    Connectives: "or" (exclusive disjunction +^bot), "prod", "arrow", "neg".
    """

    base: tuple[Value, ...] = ()
    product: tuple["ClosureSpec", "ClosureSpec"] | None = None
    connectives: frozenset[str] = frozenset()
    depth_bound: int = 4
    term: VariableTerm | None = None

    def __post_init__(self):
        if bool(self.base) == (self.product is not None):
            raise UnsupportedTarget("a closure needs a base set xor a product form")
        unknown = self.connectives - {"or", "prod", "arrow", "neg"}
        if unknown:
            raise UnsupportedTarget(f"unknown connectives {sorted(unknown)}")


def infer_term(value: Value, schema: AttributeSchema) -> VariableTerm:
    """The variable term a value's shape belongs to."""
    if isinstance(value, (Neg, Or)):
        inner = value.inner if isinstance(value, Neg) else value.left
        return infer_term(inner, schema)
    if isinstance(value, Prod):
        return Pair(infer_term(value.left, schema), infer_term(value.right, schema))
    if isinstance(value, Arrow):
        return Cond(infer_term(value.left, schema), infer_term(value.right, schema))
    return Atom(schema.owner(value.name))


def closure_member(value: Value, spec: ClosureSpec, schema: AttributeSchema) -> bool:
    """Decide membership in the closure within the depth bound."""

    def base_member(v: Value) -> bool:
        if spec.product is not None:
            left, right = spec.product
            return (
                isinstance(v, Prod)
                and closure_member(v.left, left, schema)
                and closure_member(v.right, right, schema)
            )
        return v in spec.base

    def member(v: Value, depth: int) -> bool:
        if base_member(v):
            return True
        if depth <= 0:
            return False
        if isinstance(v, Neg) and "neg" in spec.connectives:
            return member(v.inner, depth - 1)
        if isinstance(v, Or) and "or" in spec.connectives:
            if member(v.left, depth - 1) and member(v.right, depth - 1):
                return exclusive(infer_term(v, schema), v.left, v.right, schema)
            return False
        if isinstance(v, Prod) and "prod" in spec.connectives:
            return member(v.left, depth - 1) and member(v.right, depth - 1)
        if isinstance(v, Arrow) and "arrow" in spec.connectives:
            return member(v.left, depth - 1) and member(v.right, depth - 1)
        return False

    return member(value, spec.depth_bound)


def subvalues(value: Value) -> frozenset[Value]:
    """The reflexive sub-value set."""
    out = {value}
    if isinstance(value, Neg):
        out |= subvalues(value.inner)
    elif isinstance(value, (Or, Prod, Arrow)):
        out |= subvalues(value.left) | subvalues(value.right)
    return frozenset(out)


def derive_relevance(
    relevance: dict, targets, kind: str, schema: AttributeSchema, depth_bound: int = 4
) -> dict:
    """Lift an atom-level relevance map to compound (pair) targets.

    AT/WT close the relevant sets under exclusive disjunction; ET also
    closes under negation.  The result maps the printed form of each target
    term to a ClosureSpec.
    """
    if kind not in ("AT", "WT", "ET"):
        raise UnsupportedTarget(f"no relevance recursion for kind {kind!r}")
    connectives = frozenset({"or", "neg"} if kind == "ET" else {"or"})

    def spec_for(term: VariableTerm) -> ClosureSpec:
        term = reduce_projections(term)
        if isinstance(term, Atom):
            if term.name not in relevance:
                raise UnsupportedTarget(f"no relevant values given for {term.name!r}")
            return ClosureSpec(
                base=tuple(relevance[term.name]),
                connectives=connectives,
                depth_bound=depth_bound,
                term=term,
            )
        if isinstance(term, Pair):
            return ClosureSpec(
                product=(spec_for(term.left), spec_for(term.right)),
                connectives=connectives | {"prod"},
                depth_bound=depth_bound,
                term=term,
            )
        raise UnsupportedTarget(
            f"relevance recursion covers pair targets only, not {print_term(term)}"
        )

    return {print_term(reduce_projections(t)): spec_for(t) for t in targets}


# ---------------------------------------------------------------------------
# Automatic derivation of compound values


def derive_value(
    source, sigma, term: VariableTerm, value: Value, schema: AttributeSchema
) -> Derivation:
    """Derive sigma |> term : value through right introduction rules only.

    Atoms come from queries against the source; disjunctions use exclusive
    introduction, negations the double-line negation rule, conditionals the
    residuation rule, and products either the conditional introduction (for
    an atomic left component) or the independence rule.
    """
    term = reduce_projections(term)
    sigma = tuple(sigma)
    try:
        return _derive(source, sigma, term, value, schema)
    except TndpqError as exc:
        if isinstance(exc, DerivationFailed):
            raise
        raise DerivationFailed(
            f"cannot derive {print_value(value)} for {print_term(term)}: {exc}"
        ) from exc


def _derive(source, sigma, term, value, schema) -> Derivation:
    if isinstance(value, AtomVal):
        if not isinstance(term, Atom):
            raise DerivationFailed(
                f"atomic value {value.name} for non-atomic term {print_term(term)}"
            )
        return at_query(source, sigma, term.name, value.name)
    if isinstance(value, Neg):
        inner = _derive(source, sigma, term, value.inner, schema)
        return apply_rule(RuleId.NegIER, [inner], schema)
    if isinstance(value, Or):
        left = _derive(source, sigma, term, value.left, schema)
        right = _derive(source, sigma, term, value.right, schema)
        return apply_rule(RuleId.OrIR, [left, right], schema)
    if isinstance(value, Arrow):
        if not isinstance(term, Cond) or not isinstance(reduce_projections(term.antecedent), Atom):
            raise DerivationFailed(
                f"conditional value needs a conditional term with an atomic antecedent, got {print_term(term)}"
            )
        antecedent = reduce_projections(term.antecedent)
        extended = sigma + (ValueAttribution(antecedent.name, value.left),)
        body = _derive(source, extended, reduce_projections(term.consequent), value.right, schema)
        return apply_rule(RuleId.ImpIE, [body], schema)
    if isinstance(value, Prod):
        if not isinstance(term, Pair):
            raise DerivationFailed(
                f"product value for non-pair term {print_term(term)}"
            )
        left_term = reduce_projections(term.left)
        right_term = reduce_projections(term.right)
        if isinstance(left_term, Atom) and _is_class_o(value.left):
            try:
                # conditional route: sigma, t:beta |> u:delta then I-times-1
                minor = _derive(source, sigma, left_term, value.left, schema)
                extended = sigma + (ValueAttribution(left_term.name, value.left),)
                major = _derive(source, extended, right_term, value.right, schema)
                return apply_rule(RuleId.ProdI1, [major, minor], schema)
            except TndpqError:
                pass
        if isinstance(source, tuple) and isinstance(left_term, Atom) and isinstance(right_term, Atom):
            ts, est = source
            verdict, witness = independent(ts, est, sigma, left_term.name, right_term.name)
            if not verdict:
                raise DerivationFailed(
                    f"components of {print_value(value)} are neither conditionally "
                    f"derivable nor independent (max deviation {witness['max_deviation']:.3g})"
                )
            side = [
                {
                    "kind": "independent",
                    "t": left_term.name,
                    "u": right_term.name,
                    "verdict": True,
                    **witness,
                }
            ]
            right_d = _derive(source, sigma, right_term, value.right, schema)
            left_d = _derive(source, sigma, left_term, value.left, schema)
            return apply_rule(RuleId.ProdIIndep, [right_d, left_d], schema, side=side)
        raise DerivationFailed(
            f"no introduction route for {print_value(value)} over {print_term(term)}"
        )
    raise DerivationFailed(f"unrecognized value {print_value(value)}")


def _is_class_o(value: Value) -> bool:
    if isinstance(value, AtomVal):
        return True
    if isinstance(value, Neg):
        return _is_class_o(value.inner)
    if isinstance(value, Or):
        return _is_class_o(value.left) and _is_class_o(value.right)
    return False


def zero_probe_values(term: VariableTerm, schema: AttributeSchema):
    """Negation-free single-connective probes fitting the term's shape."""
    term = reduce_projections(term)
    if isinstance(term, Atom):
        atoms = [AtomVal(a) for a in schema.atoms(term.name)]
        probes = list(atoms)
        for i, a in enumerate(atoms):
            for b in atoms[i + 1 :]:
                probes.append(Or(a, b))
        return probes
    if isinstance(term, Pair):
        return [
            Prod(left, right)
            for left in zero_probe_values(term.left, schema)
            if isinstance(left, AtomVal)
            for right in zero_probe_values(term.right, schema)
            if isinstance(right, AtomVal)
        ]
    return [
        Arrow(left, right)
        for left in zero_probe_values(term.antecedent, schema)
        if isinstance(left, AtomVal)
        for right in zero_probe_values(term.consequent, schema)
        if isinstance(right, AtomVal)
    ]


# ---------------------------------------------------------------------------
# Preservation


def _plan_uses(plan: Plan, rule: RuleId, direction: str | None = None) -> bool:
    return any(
        step.rule == rule and (direction is None or step.direction == direction)
        for step in plan.steps
    )


def _preservation_guaranteed(kind: TrustKind, mode: str, plan: Plan) -> tuple[bool, str]:
    """Whether a theorem covers this kind/mode/plan combination."""
    if kind.name == "JT":
        return True, "construction and deconstruction preserve JT"
    if kind.name == "ET":
        if mode == "construct":
            return True, "construction preserves ET"
        return True, "deconstruction into sub-values preserves ET"
    if mode == "deconstruct":
        return False, f"no theorem covers {kind.name} under deconstruction"
    if _plan_uses(plan, RuleId.NegIER, "forward"):
        return False, f"{kind.name} preservation is proved for negation-free construction only"
    return True, f"negation-free construction preserves {kind.name}"


def verify_preservation(
    orig_inputs: dict,
    copy_inputs: dict,
    plan: Plan,
    kind: TrustKind,
    mode: str,
    schema: AttributeSchema,
    tol: float = 0.0,
    strict: bool = False,
) -> TrustReport:
    """Run one plan on an original and a copy and check trust preservation.

    Input derivations are first verified pairwise for the stated kind.  The
    report's warning field marks verdicts that are merely empirical because
    no preservation theorem covers the combination; with strict=True such
    combinations raise TheoremDoesNotApply instead.
    """
    if mode not in ("construct", "deconstruct"):
        raise PreconditionFailed(f"unknown mode {mode!r}")
    if set(orig_inputs) != set(copy_inputs):
        raise PreconditionFailed("original and copy input names differ")
    for name in orig_inputs:
        f = orig_inputs[name].conclusion.probability
        g = copy_inputs[name].conclusion.probability
        if kind.name in ("JT", "ET"):
            ok = abs(f - g) <= tol
        else:
            ok = g >= f - tol
            if kind.name == "WT":
                ok = ok and (abs(f) <= tol) == (abs(g) <= tol)
        if not ok:
            raise PreconditionFailed(
                f"inputs {name!r} do not stand in {kind}: original {f!r}, copy {g!r}"
            )
    guaranteed, reason = _preservation_guaranteed(kind, mode, plan)
    if strict and not guaranteed:
        raise TheoremDoesNotApply(reason)
    runner = construct if mode == "construct" else deconstruct
    result_orig = runner(orig_inputs, plan, schema)
    result_copy = runner(copy_inputs, plan, schema)
    f = result_orig.conclusion.probability
    g = result_copy.conclusion.probability
    report = TrustReport(kind)
    label = print_value(result_orig.conclusion.value)
    if kind.name in ("JT", "ET"):
        report.add(label, f, g, "g = f", abs(f - g) <= tol)
    else:
        report.add(label, f, g, "g >= f", g >= f - tol)
        if kind.name == "WT":
            report.add(label, f, g, "g = 0 iff f = 0", (abs(f) <= tol) == (abs(g) <= tol))
    if not guaranteed:
        report.warning = f"empirical verdict only: {reason}"
    return report
