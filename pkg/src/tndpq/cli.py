"""Command-line interface.

One binary with subcommands: parse, learn, derive, exclusive, compare,
chain, preserve, and selftest.  Verdict-bearing commands end with a single
machine-parseable `VERDICT` line; exit status 0 means the verdict is true
(or the command simply succeeded), 1 means the verdict is false, and 2
means a usage or data error.  All tabular output is tab-separated and
deterministically ordered.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from .errors import TndpqError, UnknownCondition
from .calculus import Derivation, RuleId, at_query, apply_rule, check_derivation
from .construction import Plan, PlanStep, construct, deconstruct, verify_preservation
from .exclusivity import exclusive, oracle_exclusive
from .syntax import (
    Atom,
    AtomVal,
    AttributeSchema,
    Neg,
    Or,
    load_schema,
    parse_attribution_list,
    parse_judgment,
    parse_term,
    parse_value,
    print_judgment,
)
from .systems import (
    AppliedSystem,
    Estimator,
    conditional_distribution,
    independent,
    load_applied_system,
    load_training_set,
    save_applied_system,
)
from . import trust


def _parse_estimator(spec: str) -> Estimator:
    if spec == "freq":
        return Estimator("freq", "freq")
    if spec.startswith("laplace:"):
        return Estimator(spec, "laplace", float(spec.split(":", 1)[1]))
    if spec == "laplace":
        return Estimator("laplace", "laplace")
    raise TndpqError(f"unknown estimator spec {spec!r}, expected freq or laplace:<a>")


def _parse_kind(spec: str) -> trust.TrustKind:
    name, _, m = spec.partition(":")
    name = name.lower()
    if name == "jt":
        if m:
            raise TndpqError("jt takes no prefix length")
        return trust.jt()
    if name in ("et", "wt", "at"):
        if not m:
            raise TndpqError(f"{name} needs a prefix length, e.g. {name}:2")
        return trust.TrustKind(name.upper(), int(m))
    raise TndpqError(f"unknown trust kind {spec!r}")


def _kind_label(kind: trust.TrustKind) -> str:
    label = kind.name.lower()
    return label if kind.m is None else f"{label}:{kind.m}"


# ---------------------------------------------------------------------------
# Proof scripts
#
# One step per line:  `id = RULE premise_ids... [| side assertions]`
# Leaves:             `id = ATQUERY [attrlist |>] variable : atom`
# The two double-line rules accept an optional `@backward` marker after the
# rule name.  Side assertions: `independent t u` (verified on the data
# source) or `assume-independent t u` (taken on faith).


class ScriptStep:
    def __init__(self, id, rule, operands, direction, side_text, leaf=None):
        self.id = id
        self.rule = rule
        self.operands = operands
        self.direction = direction
        self.side_text = side_text
        self.leaf = leaf  # (sigma, variable, atom) for ATQUERY


def parse_script(text: str, schema: AttributeSchema) -> list[ScriptStep]:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise TndpqError(f"script line {lineno}: expected `id = RULE ...`")
        name, rest = line.split("=", 1)
        name = name.strip()
        rest = rest.strip()
        rule_name, _, tail = rest.partition(" ")
        if rule_name.upper() == "ATQUERY":
            leaf_text = tail.strip()
            if "|>" in leaf_text:
                sigma_text, leaf_text = leaf_text.split("|>", 1)
                sigma = parse_attribution_list(sigma_text.strip())
            else:
                sigma = ()
            var, _, atom = leaf_text.partition(":")
            var, atom = var.strip(), atom.strip()
            if not var or not atom:
                raise TndpqError(f"script line {lineno}: ATQUERY needs `variable : atom`")
            steps.append(ScriptStep(name, None, (), "forward", "", (sigma, var, atom)))
            continue
        head, _, side_text = tail.partition("|")
        args = head.split()
        if not rule_name:
            raise TndpqError(f"script line {lineno}: missing rule name")
        try:
            rule = RuleId(rule_name)
        except ValueError:
            raise TndpqError(f"script line {lineno}: unknown rule {rule_name!r}") from None
        direction = "forward"
        if args and args[0] == "@backward":
            direction = "backward"
            args = args[1:]
        steps.append(ScriptStep(name, rule, tuple(args), direction, side_text.strip()))
    if not steps:
        raise TndpqError("empty proof script")
    return steps


def _side_evidence(step: ScriptStep, source):
    if not step.side_text:
        return ()
    tokens = step.side_text.split()
    if len(tokens) != 3 or tokens[0] not in ("independent", "assume-independent"):
        raise TndpqError(
            f"step {step.id}: side assertion must be `independent t u` "
            "or `assume-independent t u`"
        )
    _, t, u = tokens
    if tokens[0] == "assume-independent":
        return ({"kind": "independent", "t": t, "u": u, "asserted": True},)
    if not isinstance(source, tuple):
        raise TndpqError(f"step {step.id}: cannot verify independence without a training table")
    ts, est = source
    verdict, witness = independent(ts, est, (), t, u)
    return ({"kind": "independent", "t": t, "u": u, "verdict": verdict, **witness},)


def run_script(steps, sources, schema) -> dict[str, Derivation]:
    """Execute a proof script; `sources` is a list tried in order for leaves."""
    env: dict[str, Derivation] = {}
    for step in steps:
        if step.leaf is not None:
            sigma, var, atom = step.leaf
            errors = []
            for source in sources:
                try:
                    env[step.id] = at_query(source, sigma, var, atom)
                    break
                except UnknownCondition as exc:
                    errors.append(exc)
            else:
                raise UnknownCondition(
                    f"step {step.id}: no provided system covers this query"
                    + (f" ({errors[0]})" if errors else "")
                )
            continue
        try:
            premises = [env[p] for p in step.operands]
        except KeyError as exc:
            raise TndpqError(f"step {step.id}: unknown premise {exc}") from None
        side = _side_evidence(step, sources[0] if sources else None)
        env[step.id] = apply_rule(
            step.rule, premises, schema, side=side, direction=step.direction
        )
    return env


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_parse(args) -> int:
    schema = load_schema(args.schema)
    judgment = parse_judgment(args.judgment, schema)
    judgment.validate(schema)
    print(print_judgment(judgment))
    return 0


def _cmd_learn(args) -> int:
    schema = load_schema(args.schema)
    ts = load_training_set(args.csv, schema)
    est = _parse_estimator(args.estimator)
    sigma = parse_attribution_list(args.sigma) if args.sigma else ()
    system = conditional_distribution(ts, est, sigma, args.target)
    for atom, p in system.distribution:
        print(f"{atom}\t{p!r}")
    if args.output:
        save_applied_system(system, args.output)
    return 0


def _cmd_derive(args) -> int:
    schema = load_schema(args.schema)
    ts = load_training_set(args.source, schema)
    est = _parse_estimator(args.estimator)
    source = (ts, est)
    with open(args.script, encoding="utf-8") as handle:
        steps = parse_script(handle.read(), schema)
    env = run_script(steps, [source], schema)
    for step in steps:
        print(f"{step.id}\t{print_judgment(env[step.id].conclusion)}")
    if args.check:
        used = {p for step in steps for p in step.operands}
        ok = True
        for step in steps:
            if step.id in used:
                continue
            report = check_derivation(env[step.id], schema, sources={ts.id: source})
            for path, kind, message in report.violations:
                ok = False
                print(f"CHECK\t{step.id}{path}\t{kind}\t{message}", file=sys.stderr)
        if not ok:
            return 2
        print("CHECK\tok")
    return 0


def _cmd_exclusive(args) -> int:
    schema = load_schema(args.schema)
    term = parse_term(args.term)
    beta = parse_value(args.value1)
    delta = parse_value(args.value2)
    trace: list[str] | None = [] if args.explain else None
    verdict = exclusive(term, beta, delta, schema, trace=trace)
    if trace is not None:
        for line in trace:
            print(f"TRACE\t{line}")
    print("exclusive" if verdict else "not-exclusive")
    return 0 if verdict else 1


def _cmd_compare(args) -> int:
    schema = load_schema(args.schema)
    original = load_applied_system(args.original, schema)
    copy = load_applied_system(args.copy, schema)
    kind = _parse_kind(args.kind)
    report = trust.check_local(original, copy, kind, tol=args.tol)
    for label, f, g, condition, ok in report.evidence:
        print(f"{label}\t{f!r}\t{g!r}\t{condition}\t{'ok' if ok else 'violated'}")
    if report.warning:
        print(f"WARNING\t{report.warning}")
    print(f"VERDICT {_kind_label(kind)} {'true' if report.verdict else 'false'}")
    return 0 if report.verdict else 1


def _cmd_chain(args) -> int:
    schema = load_schema(args.schema)
    system = load_applied_system(args.system, schema)
    chain_a, chain_b, report = trust.build_chain(
        system, system, args.m, args.k, variant=args.variant, steps=args.steps, l=args.l
    )
    def fmt(dist):
        return ",".join(str(Fraction(p)) for p in dist)
    print("step\tin-relation\tjt-again\tet-again\tchain-a\tchain-b")
    for entry in report.steps:
        print(
            f"{entry['step']}\t{entry['parent_relation']}\t{entry['jt_cross']}"
            f"\t{entry['et_cross']}\t{fmt(entry['f'])}\t{fmt(entry['g'])}"
        )
    label = f"chain-{report.variant.lower()}"
    print(f"VERDICT {label} {'true' if report.ok else 'false'}")
    return 0 if report.ok else 1


def _load_side(paths, schema):
    return [load_applied_system(p, schema) for p in paths]


def _cmd_preserve(args) -> int:
    schema = load_schema(args.schema)
    orig_systems = _load_side(args.orig, schema)
    copy_systems = _load_side(args.copy, schema)
    with open(args.plan, encoding="utf-8") as handle:
        steps = parse_script(handle.read(), schema)
    leaves = [s for s in steps if s.leaf is not None]
    rules = [s for s in steps if s.leaf is None]
    if not leaves or not rules:
        raise TndpqError("a preservation plan needs ATQUERY inputs and rule steps")

    def inputs_for(systems):
        return {
            s.id: at_query(_covering(systems, s.leaf), s.leaf[0], s.leaf[1], s.leaf[2])
            for s in leaves
        }

    def _covering(systems, leaf):
        sigma, var, _ = leaf
        for system in systems:
            try:
                at_query(system, sigma, var, system.atoms[0])
                return system
            except UnknownCondition:
                continue
        raise UnknownCondition(f"no provided system covers {var!r} under the given context")

    plan = Plan(
        tuple(
            PlanStep(s.id, s.rule, s.operands, direction=s.direction)
            for s in rules
        )
    )
    kind = trust.TrustKind(args.kind.upper(), None if args.kind == "jt" else 1)
    report = verify_preservation(
        inputs_for(orig_systems),
        inputs_for(copy_systems),
        plan,
        kind,
        args.mode,
        schema,
        tol=args.tol,
    )
    for label, f, g, condition, ok in report.evidence:
        print(f"{label}\t{f!r}\t{g!r}\t{condition}\t{'ok' if ok else 'violated'}")
    if report.warning:
        print(f"WARNING\t{report.warning}")
    print(f"VERDICT preserve-{args.kind} {'true' if report.verdict else 'false'}")
    return 0 if report.verdict else 1


# ---------------------------------------------------------------------------
# Self test


def _selftest_inversion(rng, cases, schema):
    failures = 0
    for _ in range(cases):
        f = rng.uniform(0.05, 0.95)
        g = rng.uniform(0.05, 0.95)
        sigma = ()
        from .syntax import Judgment, ValueAttribution

        minor = Derivation(
            Judgment(sigma, Atom("X"), AtomVal("a"), f), RuleId.AtQuery, (), ()
        )
        major = Derivation(
            Judgment(
                (ValueAttribution("X", AtomVal("a")),), Atom("Y"), AtomVal("u"), g
            ),
            RuleId.AtQuery,
            (),
            (),
        )
        pair = apply_rule(RuleId.ProdI1, [major, minor], schema)
        back = apply_rule(RuleId.ProdE1a, [pair, major], schema)
        if abs(back.conclusion.probability - f) > 1e-9:
            failures += 1
    return failures


def _selftest_exclusivity(rng, cases, schema):
    atoms = [AtomVal(a) for a in schema.atoms("X")]

    def rand_value(depth):
        if depth == 0 or rng.random() < 0.4:
            return rng.choice(atoms)
        if rng.random() < 0.5:
            return Neg(rand_value(depth - 1))
        return Or(rand_value(depth - 1), rand_value(depth - 1))

    failures = 0
    for _ in range(cases):
        beta, delta = rand_value(3), rand_value(3)
        if exclusive(Atom("X"), beta, delta, schema) != oracle_exclusive(
            Atom("X"), beta, delta, schema
        ):
            failures += 1
    return failures


def _selftest_trust(rng, cases):
    samples = []
    for _ in range(cases):
        triple = []
        base = [Fraction(rng.randint(0, 6), 1) for _ in range(4)]
        if sum(base) == 0:
            base[0] = Fraction(1)
        total = sum(base)
        base = [p / total for p in base]
        for _ in range(3):
            probs = list(base)
            if rng.random() < 0.5:
                i, j = rng.sample(range(4), 2)
                delta = min(probs[i], Fraction(1, 8))
                probs[i] -= delta
                probs[j] += delta
            triple.append(
                AppliedSystem(
                    "t", "e", (), "X",
                    tuple((a, float(p)) for a, p in zip("abcd", probs)),
                )
            )
        samples.append(tuple(triple))
    report = trust.verify_algebra(samples)
    return len(report.failures)


def _cmd_selftest(args) -> int:
    rng = random.Random(args.seed)
    print(f"SEED\t{args.seed}")
    schema = AttributeSchema.of({"X": ("a", "b", "c", "d"), "Y": ("u", "v")})
    suites = (
        ("inversion", lambda: _selftest_inversion(rng, args.cases, schema)),
        ("exclusivity-oracle", lambda: _selftest_exclusivity(rng, args.cases, schema)),
        ("trust-algebra", lambda: _selftest_trust(rng, max(args.cases // 10, 5))),
    )
    bad = 0
    for name, suite in suites:
        failures = suite()
        bad += failures
        print(f"{'PASS' if failures == 0 else 'FAIL'}\t{name}\t{failures} failures")
    print(f"VERDICT selftest {'true' if bad == 0 else 'false'}")
    return 0 if bad == 0 else 1


# ---------------------------------------------------------------------------
# Entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tndpq", description="probabilistic judgment calculus toolbox"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="round-trip a judgment through the grammar")
    p.add_argument("schema")
    p.add_argument("judgment")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("learn", help="estimate a conditional distribution from a CSV")
    p.add_argument("schema")
    p.add_argument("csv")
    p.add_argument("--sigma", default="")
    p.add_argument("--target", required=True)
    p.add_argument("--estimator", default="freq")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("derive", help="run a proof script against a training table")
    p.add_argument("schema")
    p.add_argument("source", help="training CSV")
    p.add_argument("--script", required=True)
    p.add_argument("--estimator", default="freq")
    p.add_argument("--check", action="store_true")
    p.set_defaults(func=_cmd_derive)

    p = sub.add_parser("exclusive", help="decide mutual exclusivity of two values")
    p.add_argument("schema")
    p.add_argument("term")
    p.add_argument("value1")
    p.add_argument("value2")
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=_cmd_exclusive)

    p = sub.add_parser("compare", help="check a trust relation between two systems")
    p.add_argument("schema")
    p.add_argument("original")
    p.add_argument("copy")
    p.add_argument("--kind", required=True, help="jt | et:<m> | wt:<m> | at:<m>")
    p.add_argument("--tol", type=float, default=0.0)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("chain", help="build diverging trust chains from one system")
    p.add_argument("schema")
    p.add_argument("system")
    p.add_argument("--variant", choices=("at", "wt", "et"), default="at")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int)
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(func=_cmd_chain)

    p = sub.add_parser("preserve", help="check trust preservation along a plan")
    p.add_argument("schema")
    p.add_argument("--orig", nargs="+", required=True)
    p.add_argument("--copy", nargs="+", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--kind", choices=("jt", "et", "at", "wt"), required=True)
    p.add_argument("--mode", choices=("construct", "deconstruct"), required=True)
    p.add_argument("--tol", type=float, default=0.0)
    p.set_defaults(func=_cmd_preserve)

    p = sub.add_parser("selftest", help="run the seeded property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=200)
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TndpqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
