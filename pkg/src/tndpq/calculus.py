"""The inference-rule engine.

Every rule pairs a schematic premise shape with a probability formula.
`apply_rule` matches concrete premise derivations against the shapes,
discharges side conditions (mutual exclusivity through the decision
procedure, independence through a numeric test or explicit assertion),
computes the conclusion probability and returns an immutable derivation
tree.  `check_derivation` re-verifies a tree node by node.

Naming: I-rules introduce a connective in the conclusion, E-rules eliminate
one; the trailing digit or letter distinguishes variants that conclude
different premise slots.  ImpIE and NegIER are double-line rules usable in
both directions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import (
    ConsistencyError,
    ProvenanceMismatch,
    ShapeMismatch,
    SideConditionUnproved,
    UnknownCondition,
    ZeroDenominator,
)
from .exclusivity import exclusive
from .syntax import (
    Arrow,
    Atom,
    AttributeSchema,
    Cond,
    Fst,
    Judgment,
    Neg,
    Or,
    Pair,
    Prod,
    Snd,
    Value,
    ValueAttribution,
    VariableTerm,
    print_judgment,
    print_term,
    print_value,
    reduce_projections,
    same_sigma,
)
from .systems import AppliedSystem, Estimator, TrainingSet, conditional_distribution

_TOL = 1e-9


class RuleId(str, enum.Enum):
    AtQuery = "AtQuery"
    ImpIE = "ImpIE"
    ProdI1 = "ProdI1"
    ProdI2 = "ProdI2"
    ProdE1a = "ProdE1a"
    ProdE1b = "ProdE1b"
    ProdE2a = "ProdE2a"
    ProdE2b = "ProdE2b"
    OrIR = "OrIR"
    OrERa = "OrERa"
    OrERb = "OrERb"
    OrIL = "OrIL"
    OrELa = "OrELa"
    OrELb = "OrELb"
    OrELc = "OrELc"
    OrELd = "OrELd"
    NegIER = "NegIER"
    NegIL = "NegIL"
    NegELa = "NegELa"
    NegELb = "NegELb"
    NegELc = "NegELc"
    ProdIIndep = "ProdIIndep"


@dataclass(frozen=True)
class Derivation:
    conclusion: Judgment
    rule: RuleId
    premises: tuple["Derivation", ...] = ()
    side_conditions: tuple[dict, ...] = ()
    provenance: tuple[str, str] | None = None
    direction: str = "forward"

    def leaves(self):
        if not self.premises:
            yield self
        for premise in self.premises:
            yield from premise.leaves()


# ---------------------------------------------------------------------------
# Axioms


def at_query(source, sigma, variable: str, atom: str) -> Derivation:
    """Leaf derivation importing P(variable=atom | sigma) from a system.

    `source` is either an (TrainingSet, Estimator) pair or a precomputed
    AppliedSystem whose context and target must match the query.
    """
    sigma = tuple(sigma)
    if isinstance(source, AppliedSystem):
        system = source
        if system.variable != variable or not same_sigma(system.sigma, sigma):
            raise UnknownCondition(
                "stored applied system does not cover the requested context"
            )
    else:
        ts, est = source
        system = conditional_distribution(ts, est, sigma, variable)
    from .syntax import AtomVal

    conclusion = Judgment(sigma, Atom(variable), AtomVal(atom), system.probability(atom))
    return Derivation(conclusion, RuleId.AtQuery, (), (), (system.training, system.estimator))


# ---------------------------------------------------------------------------
# Rule application machinery


def _merge_provenance(premises) -> tuple[str, str] | None:
    tags = {p.provenance for p in premises if p.provenance is not None}
    if len(tags) > 1:
        raise ProvenanceMismatch(f"premises tagged with {sorted(tags)}")
    return tags.pop() if tags else None


def _finish(p: float, rule: RuleId) -> float:
    if p < -_TOL or p > 1.0 + _TOL:
        raise ConsistencyError(f"{rule.value} gives probability {p!r}, outside [0, 1]")
    return min(1.0, max(0.0, p))


def _nonzero(x: float, rule: RuleId, what: str) -> float:
    if x == 0.0:
        raise ZeroDenominator(f"{rule.value}: {what} is zero")
    return x


def _want(count: int, premises, rule: RuleId):
    if len(premises) != count:
        raise ShapeMismatch(f"{rule.value} takes {count} premises, got {len(premises)}")
    return [p.conclusion for p in premises]


def _extension(judgment: Judgment, base_sigma) -> ValueAttribution:
    """The single attribution extending base_sigma in the judgment's antecedent."""
    base = {(va.variable, va.value) for va in base_sigma}
    extra = [va for va in judgment.antecedent if (va.variable, va.value) not in base]
    rest = [va for va in judgment.antecedent if (va.variable, va.value) in base]
    if len(extra) != 1 or len(rest) != len(base):
        raise ShapeMismatch(
            f"antecedent of {print_judgment(judgment)} does not extend the context by one attribution"
        )
    return extra[0]


def _require(condition: bool, rule: RuleId, message: str) -> None:
    if not condition:
        raise ShapeMismatch(f"{rule.value}: {message}")


def _attribution_term(va: ValueAttribution) -> VariableTerm:
    return Atom(va.variable)


def _as_atom(term: VariableTerm, rule: RuleId) -> Atom:
    term = reduce_projections(term)
    if not isinstance(term, Atom):
        raise ShapeMismatch(
            f"{rule.value}: {print_term(term)} cannot appear in an antecedent"
        )
    return term


def _same_subject(a: VariableTerm, b: VariableTerm) -> bool:
    return reduce_projections(a) == reduce_projections(b)


def _exclusivity_evidence(term, left, right, schema, rule) -> dict:
    trace: list[str] = []
    if not exclusive(term, left, right, schema, trace=trace):
        raise SideConditionUnproved(
            f"{rule.value}: {print_term(term)}: {print_value(left)} and "
            f"{print_value(right)} are not mutually exclusive"
        )
    return {
        "kind": "exclusive",
        "term": print_term(term),
        "left": print_value(left),
        "right": print_value(right),
        "trace": tuple(trace),
    }


def _independence_evidence(side, t, u, rule) -> dict:
    for fact in side or ():
        if fact.get("kind") != "independent":
            continue
        if {fact.get("t"), fact.get("u")} == {t, u}:
            if fact.get("asserted") or fact.get("verdict"):
                return dict(fact)
            raise SideConditionUnproved(
                f"{rule.value}: independence evidence for {t!r}, {u!r} is negative"
            )
    raise SideConditionUnproved(
        f"{rule.value}: no independence evidence for {t!r} and {u!r}"
    )


def apply_rule(
    rule: RuleId,
    premises,
    schema: AttributeSchema,
    side=(),
    direction: str = "forward",
) -> Derivation:
    """Apply one inference rule to premise derivations."""
    premises = tuple(premises)
    provenance = _merge_provenance(premises)
    handler = _HANDLERS[rule]
    conclusion, evidence = handler(premises, schema, side, direction)
    return Derivation(conclusion, rule, premises, tuple(evidence), provenance, direction)


# Each handler returns (conclusion judgment, side-condition evidence).


def _rule_imp_ie(premises, schema, side, direction):
    (p,) = _want(1, premises, RuleId.ImpIE)
    if direction == "forward":
        _require(len(p.antecedent) >= 1, RuleId.ImpIE, "empty antecedent, nothing to discharge")
        moved = p.antecedent[-1]
        conclusion = Judgment(
            p.antecedent[:-1],
            Cond(Atom(moved.variable), p.subject),
            Arrow(moved.value, p.value),
            p.probability,
        )
        return conclusion, []
    term = reduce_projections(p.subject)
    _require(isinstance(term, Cond), RuleId.ImpIE, "subject is not a conditional term")
    _require(isinstance(p.value, Arrow), RuleId.ImpIE, "value is not a conditional")
    antecedent_term = _as_atom(term.antecedent, RuleId.ImpIE)
    conclusion = Judgment(
        p.antecedent + (ValueAttribution(antecedent_term.name, p.value.left),),
        term.consequent,
        p.value.right,
        p.probability,
    )
    return conclusion, []


def _rule_prod_i(premises, schema, side, direction, swapped):
    rule = RuleId.ProdI2 if swapped else RuleId.ProdI1
    major, minor = _want(2, premises, rule)
    sigma = minor.antecedent
    extra = _extension(major, sigma)
    minor_term = _as_atom(minor.subject, rule)
    _require(extra.variable == minor_term.name, rule, "antecedent extension does not match the minor premise subject")
    _require(extra.value == minor.value, rule, "antecedent extension value differs from the minor premise")
    f, g = minor.probability, major.probability
    if swapped:
        # major: sigma, u:delta |> t:beta ; minor: sigma |> u:delta
        t_term, u_term = major.subject, minor.subject
        beta, delta = major.value, minor.value
    else:
        # major: sigma, t:beta |> u:delta ; minor: sigma |> t:beta
        t_term, u_term = minor.subject, major.subject
        beta, delta = minor.value, major.value
    conclusion = Judgment(
        sigma, Pair(t_term, u_term), Prod(beta, delta), _finish(f * g, rule)
    )
    return conclusion, []


def _rule_prod_e(premises, schema, side, direction, second, conditional_form):
    rule = {
        (False, False): RuleId.ProdE1a,
        (False, True): RuleId.ProdE1b,
        (True, False): RuleId.ProdE2a,
        (True, True): RuleId.ProdE2b,
    }[(second, conditional_form)]
    major, minor = _want(2, premises, rule)
    _require(isinstance(major.value, Prod), rule, "major premise value is not a product")
    beta, delta = major.value.left, major.value.right
    t = major.subject
    first_term = reduce_projections(Fst(t))
    second_term = reduce_projections(Snd(t))
    sigma = major.antecedent
    kept_term, kept_value = (second_term, delta) if second else (first_term, beta)
    other_term, other_value = (first_term, beta) if second else (second_term, delta)
    f = major.probability
    g = _nonzero(minor.probability, rule, "the minor premise probability")
    if conditional_form:
        # minor: sigma |> kept : value ; conclusion extends sigma with it
        _require(same_sigma(minor.antecedent, sigma), rule, "minor premise context differs")
        _require(_same_subject(minor.subject, kept_term), rule, "minor premise subject mismatch")
        _require(minor.value == kept_value, rule, "minor premise value mismatch")
        kept_atom = _as_atom(kept_term, rule)
        conclusion = Judgment(
            sigma + (ValueAttribution(kept_atom.name, kept_value),),
            other_term,
            other_value,
            _finish(f / g, rule),
        )
    else:
        # minor: sigma, kept : value |> other ; conclusion is sigma |> kept
        extra = _extension(minor, sigma)
        kept_atom = _as_atom(kept_term, rule)
        _require(extra.variable == kept_atom.name and extra.value == kept_value, rule, "minor premise antecedent mismatch")
        _require(_same_subject(minor.subject, other_term), rule, "minor premise subject mismatch")
        _require(minor.value == other_value, rule, "minor premise value mismatch")
        conclusion = Judgment(sigma, kept_term, kept_value, _finish(f / g, rule))
    return conclusion, []


def _rule_or_ir(premises, schema, side, direction):
    rule = RuleId.OrIR
    p1, p2 = _want(2, premises, rule)
    _require(same_sigma(p1, p2), rule, "premise contexts differ")
    _require(_same_subject(p1.subject, p2.subject), rule, "premise subjects differ")
    evidence = _exclusivity_evidence(p1.subject, p1.value, p2.value, schema, rule)
    conclusion = Judgment(
        p1.antecedent,
        p1.subject,
        Or(p1.value, p2.value),
        _finish(p1.probability + p2.probability, rule),
    )
    return conclusion, [evidence]


def _rule_or_er(premises, schema, side, direction, second):
    rule = RuleId.OrERb if second else RuleId.OrERa
    p1, p2 = _want(2, premises, rule)
    _require(isinstance(p1.value, Or), rule, "major premise value is not a disjunction")
    _require(same_sigma(p1, p2), rule, "premise contexts differ")
    _require(_same_subject(p1.subject, p2.subject), rule, "premise subjects differ")
    expected = p1.value.right if second else p1.value.left
    remaining = p1.value.left if second else p1.value.right
    _require(p2.value == expected, rule, "minor premise value is not the matching disjunct")
    conclusion = Judgment(
        p1.antecedent,
        p1.subject,
        remaining,
        _finish(p1.probability - p2.probability, rule),
    )
    return conclusion, []


def _rule_or_il(premises, schema, side, direction):
    rule = RuleId.OrIL
    p1, p2, p3, p4 = _want(4, premises, rule)
    sigma = p3.antecedent
    _require(same_sigma(p3, p4), rule, "categorical premise contexts differ")
    _require(_same_subject(p3.subject, p4.subject), rule, "categorical premise subjects differ")
    gamma, beta = p3.value, p4.value
    e1 = _extension(p1, sigma)
    e2 = _extension(p2, sigma)
    t_atom = _as_atom(p3.subject, rule)
    _require(e1.variable == t_atom.name and e1.value == gamma, rule, "first premise must condition on the gamma attribution")
    _require(e2.variable == t_atom.name and e2.value == beta, rule, "second premise must condition on the beta attribution")
    _require(_same_subject(p1.subject, p2.subject) and p1.value == p2.value, rule, "conditional premises disagree on the queried attribution")
    evidence = _exclusivity_evidence(p3.subject, gamma, beta, schema, rule)
    f, g, h, i = p1.probability, p2.probability, p3.probability, p4.probability
    denom = _nonzero(h + i, rule, "h + i")
    conclusion = Judgment(
        sigma + (ValueAttribution(t_atom.name, Or(gamma, beta)),),
        p1.subject,
        p1.value,
        _finish((f * h + g * i) / denom, rule),
    )
    return conclusion, [evidence]


def _rule_or_el_ab(premises, schema, side, direction, second):
    rule = RuleId.OrELb if second else RuleId.OrELa
    p1, p2, p3, p4 = _want(4, premises, rule)
    sigma = p3.antecedent
    _require(same_sigma(p3, p4), rule, "categorical premise contexts differ")
    _require(_same_subject(p3.subject, p4.subject), rule, "categorical premise subjects differ")
    gamma, beta = p3.value, p4.value
    t_atom = _as_atom(p3.subject, rule)
    e1 = _extension(p1, sigma)
    _require(e1.variable == t_atom.name and e1.value == Or(gamma, beta), rule, "major premise must condition on the disjunction")
    e2 = _extension(p2, sigma)
    minor_value = gamma if second else beta
    concl_value = beta if second else gamma
    _require(e2.variable == t_atom.name and e2.value == minor_value, rule, "second premise conditions on the wrong disjunct")
    _require(_same_subject(p1.subject, p2.subject) and p1.value == p2.value, rule, "conditional premises disagree on the queried attribution")
    f, g, h, i = p1.probability, p2.probability, p3.probability, p4.probability
    if second:
        p = (f * (h + i) - g * h) / _nonzero(i, rule, "i")
    else:
        p = (f * (h + i) - g * i) / _nonzero(h, rule, "h")
    conclusion = Judgment(
        sigma + (ValueAttribution(t_atom.name, concl_value),),
        p1.subject,
        p1.value,
        _finish(p, rule),
    )
    return conclusion, []


def _rule_or_el_cd(premises, schema, side, direction, second):
    rule = RuleId.OrELd if second else RuleId.OrELc
    p1, p2, p3, p4 = _want(4, premises, rule)
    sigma = p4.antecedent
    t_atom = _as_atom(p4.subject, rule)
    e1 = _extension(p1, sigma)
    e2 = _extension(p2, sigma)
    e3 = _extension(p3, sigma)
    gamma, beta = e1.value, e2.value
    _require(e1.variable == t_atom.name and e2.variable == t_atom.name and e3.variable == t_atom.name, rule, "conditional premises must condition on the categorical premise's variable")
    _require(e3.value == Or(gamma, beta), rule, "third premise must condition on the disjunction")
    _require(p4.value == (gamma if second else beta), rule, "categorical premise attributes the wrong disjunct")
    _require(
        _same_subject(p1.subject, p2.subject)
        and _same_subject(p2.subject, p3.subject)
        and p1.value == p2.value == p3.value,
        rule,
        "conditional premises disagree on the queried attribution",
    )
    f, g, h, i = p1.probability, p2.probability, p3.probability, p4.probability
    if second:
        denominator = h - g
        if denominator == 0.0:
            raise ZeroDenominator(f"{rule.value}: h = g (no proviso is stated for this case)")
        p = i * (f - h) / denominator
        value = beta
    else:
        denominator = h - f
        if denominator == 0.0:
            raise ZeroDenominator(f"{rule.value}: h = f (no proviso is stated for this case)")
        p = i * (g - h) / denominator
        value = gamma
    conclusion = Judgment(sigma, p4.subject, value, _finish(p, rule))
    return conclusion, []


def _rule_neg_ier(premises, schema, side, direction):
    rule = RuleId.NegIER
    (p,) = _want(1, premises, rule)
    if direction == "forward":
        value = Neg(p.value)
    else:
        _require(isinstance(p.value, Neg), rule, "value is not negated")
        value = p.value.inner
    conclusion = Judgment(p.antecedent, p.subject, value, _finish(1.0 - p.probability, rule))
    return conclusion, []


def _match_neg_triple(p_beta, p_cond, rule, negated):
    """Check that p_cond extends p_beta's context by t:beta (or its negation)."""
    sigma = p_beta.antecedent
    extra = _extension(p_cond, sigma)
    t_atom = _as_atom(p_beta.subject, rule)
    expected = Neg(p_beta.value) if negated else p_beta.value
    _require(extra.variable == t_atom.name and extra.value == expected, rule, "conditional premise conditions on the wrong attribution")
    return t_atom


def _rule_neg_il(premises, schema, side, direction):
    rule = RuleId.NegIL
    p1, p2, p3 = _want(3, premises, rule)
    _require(same_sigma(p1, p2), rule, "categorical premise contexts differ")
    t_atom = _match_neg_triple(p1, p3, rule, negated=False)
    _require(_same_subject(p2.subject, p3.subject) and p2.value == p3.value, rule, "premises disagree on the queried attribution")
    f, g, h = p1.probability, p2.probability, p3.probability
    if f == 1.0:
        raise ZeroDenominator(f"{rule.value}: f = 1")
    conclusion = Judgment(
        p1.antecedent + (ValueAttribution(t_atom.name, Neg(p1.value)),),
        p2.subject,
        p2.value,
        _finish((g - f * h) / (1.0 - f), rule),
    )
    return conclusion, []


def _rule_neg_el_a(premises, schema, side, direction):
    rule = RuleId.NegELa
    p1, p2, p3 = _want(3, premises, rule)
    _require(same_sigma(p1, p2), rule, "categorical premise contexts differ")
    t_atom = _match_neg_triple(p1, p3, rule, negated=True)
    _require(_same_subject(p2.subject, p3.subject) and p2.value == p3.value, rule, "premises disagree on the queried attribution")
    f, g, h = p1.probability, p2.probability, p3.probability
    conclusion = Judgment(
        p1.antecedent + (ValueAttribution(t_atom.name, p1.value),),
        p2.subject,
        p2.value,
        _finish((g + h * (f - 1.0)) / _nonzero(f, rule, "f"), rule),
    )
    return conclusion, []


def _rule_neg_el_b(premises, schema, side, direction):
    rule = RuleId.NegELb
    p1, p2, p3 = _want(3, premises, rule)
    _match_neg_triple(p1, p2, rule, negated=False)
    _match_neg_triple(p1, p3, rule, negated=True)
    _require(_same_subject(p2.subject, p3.subject) and p2.value == p3.value, rule, "premises disagree on the queried attribution")
    f, g, h = p1.probability, p2.probability, p3.probability
    conclusion = Judgment(
        p1.antecedent,
        p2.subject,
        p2.value,
        _finish(h - h * f + g * f, rule),
    )
    return conclusion, []


def _rule_neg_el_c(premises, schema, side, direction):
    rule = RuleId.NegELc
    p1, p2, p3 = _want(3, premises, rule)
    sigma = p1.antecedent
    e2 = _extension(p2, sigma)
    e3 = _extension(p3, sigma)
    _require(e2.variable == e3.variable and e3.value == Neg(e2.value), rule, "conditional premises must condition on an attribution and its negation")
    _require(
        _same_subject(p1.subject, p2.subject)
        and _same_subject(p2.subject, p3.subject)
        and p1.value == p2.value == p3.value,
        rule,
        "premises disagree on the queried attribution",
    )
    f, g, h = p1.probability, p2.probability, p3.probability
    if g == h:
        raise ZeroDenominator(f"{rule.value}: g = h (no proviso is stated for this case)")
    conclusion = Judgment(
        sigma, Atom(e2.variable), e2.value, _finish((f - h) / (g - h), rule)
    )
    return conclusion, []


def _rule_prod_i_indep(premises, schema, side, direction):
    rule = RuleId.ProdIIndep
    p1, p2 = _want(2, premises, rule)
    _require(same_sigma(p1, p2), rule, "premise contexts differ")
    u_name = print_term(reduce_projections(p1.subject))
    t_name = print_term(reduce_projections(p2.subject))
    evidence = _independence_evidence(side, t_name, u_name, rule)
    g, f = p1.probability, p2.probability
    conclusion = Judgment(
        p1.antecedent,
        Pair(p2.subject, p1.subject),
        Prod(p2.value, p1.value),
        _finish(f * g, rule),
    )
    return conclusion, [evidence]


_HANDLERS = {
    RuleId.ImpIE: _rule_imp_ie,
    RuleId.ProdI1: lambda p, s, c, d: _rule_prod_i(p, s, c, d, swapped=False),
    RuleId.ProdI2: lambda p, s, c, d: _rule_prod_i(p, s, c, d, swapped=True),
    RuleId.ProdE1a: lambda p, s, c, d: _rule_prod_e(p, s, c, d, second=False, conditional_form=False),
    RuleId.ProdE1b: lambda p, s, c, d: _rule_prod_e(p, s, c, d, second=False, conditional_form=True),
    RuleId.ProdE2a: lambda p, s, c, d: _rule_prod_e(p, s, c, d, second=True, conditional_form=False),
    RuleId.ProdE2b: lambda p, s, c, d: _rule_prod_e(p, s, c, d, second=True, conditional_form=True),
    RuleId.OrIR: _rule_or_ir,
    RuleId.OrERa: lambda p, s, c, d: _rule_or_er(p, s, c, d, second=False),
    RuleId.OrERb: lambda p, s, c, d: _rule_or_er(p, s, c, d, second=True),
    RuleId.OrIL: _rule_or_il,
    RuleId.OrELa: lambda p, s, c, d: _rule_or_el_ab(p, s, c, d, second=False),
    RuleId.OrELb: lambda p, s, c, d: _rule_or_el_ab(p, s, c, d, second=True),
    RuleId.OrELc: lambda p, s, c, d: _rule_or_el_cd(p, s, c, d, second=False),
    RuleId.OrELd: lambda p, s, c, d: _rule_or_el_cd(p, s, c, d, second=True),
    RuleId.NegIER: _rule_neg_ier,
    RuleId.NegIL: _rule_neg_il,
    RuleId.NegELa: _rule_neg_el_a,
    RuleId.NegELb: _rule_neg_el_b,
    RuleId.NegELc: _rule_neg_el_c,
    RuleId.ProdIIndep: _rule_prod_i_indep,
}


# ---------------------------------------------------------------------------
# Checking


@dataclass
class CheckReport:
    violations: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, path: str, kind: str, message: str) -> None:
        self.violations.append((path, kind, message))


def check_derivation(
    derivation: Derivation, schema: AttributeSchema, sources: dict | None = None
) -> CheckReport:
    """Re-verify every node of a derivation tree.

    `sources` optionally maps training-set ids to (TrainingSet, Estimator)
    pairs for recomputing leaf probabilities.  Violations are collected, not
    raised.
    """
    report = CheckReport()
    tags = set()
    _check_node(derivation, schema, sources, report, "root", tags)
    if len(tags) > 1:
        report.add("root", "ProvenanceMismatch", f"multiple provenance tags {sorted(tags)}")
    return report


def _check_node(node, schema, sources, report, path, tags):
    if node.provenance is not None:
        tags.add(node.provenance)
    if node.rule == RuleId.AtQuery:
        if node.premises:
            report.add(path, "ShapeMismatch", "axiom node with premises")
        if sources and node.provenance and node.provenance[0] in sources:
            ts, est = sources[node.provenance[0]]
            try:
                expected = at_query((ts, est), node.conclusion.antecedent,
                                    _as_atom(node.conclusion.subject, RuleId.AtQuery).name,
                                    node.conclusion.value.name)
            except Exception as exc:
                report.add(path, "UnknownCondition", str(exc))
            else:
                if abs(expected.conclusion.probability - node.conclusion.probability) > _TOL:
                    report.add(
                        path,
                        "FormulaViolation",
                        f"leaf probability {node.conclusion.probability!r}, source gives {expected.conclusion.probability!r}",
                    )
        return
    try:
        rebuilt = apply_rule(
            node.rule, node.premises, schema,
            side=node.side_conditions, direction=node.direction,
        )
    except Exception as exc:
        report.add(path, type(exc).__name__, str(exc))
    else:
        expected, actual = rebuilt.conclusion, node.conclusion
        structural = (
            expected.antecedent == actual.antecedent
            and _same_subject(expected.subject, actual.subject)
            and expected.value == actual.value
        )
        if not structural:
            report.add(path, "ShapeMismatch",
                       f"conclusion {print_judgment(actual)} differs from rule result {print_judgment(expected)}")
        elif abs(expected.probability - actual.probability) > _TOL:
            report.add(path, "FormulaViolation",
                       f"probability {actual.probability!r}, formula gives {expected.probability!r}")
    for index, premise in enumerate(node.premises):
        _check_node(premise, schema, sources, report, f"{path}.{index}", tags)
