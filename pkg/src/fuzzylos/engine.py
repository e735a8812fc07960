"""Zeroth-order Takagi-Sugeno fuzzy inference engine.

Crisp inputs are fuzzified through trapezoidal membership functions,
conjunctive IF-THEN rules fire with a min (or product) AND operator, and the
crisp output is the firing-strength-weighted average of the constant rule
consequents.  All types are frozen dataclasses; inference is a pure function,
so a built system is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping


class FisConfigError(ValueError):
    """An inference system (or one of its parts) violates a structural invariant."""


class OutOfDomainError(ValueError):
    """A crisp input lies outside its variable's declared domain."""


@dataclass(frozen=True)
class TrapezoidMF:
    """Trapezoidal membership function with breakpoints a <= b <= c <= d.

    The function is 0 outside [a, d], 1 on the plateau [b, c] and linear on
    the ramps.  b == c gives a triangle; a == b or c == d gives a vertical
    shoulder whose edge point evaluates to 1 (the limit of the ramp as its
    width goes to zero).
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if not (self.a <= self.b <= self.c <= self.d):
            raise FisConfigError(
                f"trapezoid breakpoints must satisfy a <= b <= c <= d, "
                f"got ({self.a}, {self.b}, {self.c}, {self.d})"
            )

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.d)

    @property
    def plateau(self) -> tuple[float, float]:
        return (self.b, self.c)

    def degree(self, x: float) -> float:
        """Membership degree of x, in [0, 1].  Total: never raises."""
        if x < self.a or x > self.d:
            return 0.0
        if self.b <= x <= self.c:
            return 1.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        return (self.d - x) / (self.d - self.c)

    def covers(self, x: float) -> bool:
        """True where the degree is strictly positive."""
        return self.degree(x) > 0.0


def membership_degree(mf: TrapezoidMF, x: float) -> float:
    return mf.degree(x)


@dataclass(frozen=True)
class FuzzyVariable:
    """A named input with a closed domain and ordered linguistic terms.

    Term supports must lie inside the domain but need not cover it: the
    uncovered zones are exactly where no rule can fire.
    """

    name: str
    unit: str
    domain: tuple[float, float]
    terms: tuple[tuple[str, TrapezoidMF], ...]

    def __post_init__(self) -> None:
        lo, hi = self.domain
        if not lo < hi:
            raise FisConfigError(f"variable {self.name!r}: domain [{lo}, {hi}] is empty")
        seen = set()
        for term_name, mf in self.terms:
            if term_name in seen:
                raise FisConfigError(f"variable {self.name!r}: duplicate term {term_name!r}")
            seen.add(term_name)
            if mf.a < lo or mf.d > hi:
                raise FisConfigError(
                    f"variable {self.name!r}: term {term_name!r} support "
                    f"[{mf.a}, {mf.d}] exceeds domain [{lo}, {hi}]"
                )

    def term(self, name: str) -> TrapezoidMF:
        for term_name, mf in self.terms:
            if term_name == name:
                return mf
        raise FisConfigError(f"variable {self.name!r} has no term {name!r}")

    def term_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.terms)

    def contains(self, x: float) -> bool:
        lo, hi = self.domain
        return lo <= x <= hi

    def fuzzify(self, x: float) -> dict[str, float]:
        """Membership degree of x in every term."""
        return {name: mf.degree(x) for name, mf in self.terms}


@dataclass(frozen=True)
class Rule:
    """Conjunctive IF-THEN rule with a constant consequent.

    The antecedent is a sequence of (variable name, term name) clauses joined
    by AND; an empty antecedent always fires at full strength.
    """

    antecedent: tuple[tuple[str, str], ...]
    consequent: float


@dataclass(frozen=True)
class InferenceResult:
    """Outcome of one inference: the crisp value plus rule-firing bookkeeping.

    ``fired_rule_count == 0`` encodes an anomalous input (no rule covers it);
    the raw value is then 0 by convention, which callers must not confuse with
    a legitimate output of 0.
    """

    raw: float
    fired_rule_count: int
    total_strength: float

    @property
    def is_anomaly(self) -> bool:
        return self.fired_rule_count == 0


@dataclass(frozen=True)
class SugenoFis:
    """A complete zeroth-order Sugeno system: inputs, output domain and rules.

    Immutable after construction.  ``and_operator`` is "min" (default) or
    "product".
    """

    inputs: tuple[FuzzyVariable, ...]
    output_name: str
    output_domain: tuple[float, float]
    rules: tuple[Rule, ...]
    and_operator: str = "min"

    _vars: dict[str, FuzzyVariable] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.and_operator not in ("min", "product"):
            raise FisConfigError(f"unknown AND operator {self.and_operator!r}")
        if not self.inputs:
            raise FisConfigError("an inference system needs at least one input variable")
        lo, hi = self.output_domain
        if not lo < hi:
            raise FisConfigError(f"output domain [{lo}, {hi}] is empty")
        by_name: dict[str, FuzzyVariable] = {}
        for var in self.inputs:
            if var.name in by_name or var.name == self.output_name:
                raise FisConfigError(f"duplicate variable name {var.name!r}")
            by_name[var.name] = var
        object.__setattr__(self, "_vars", by_name)

        seen_antecedents = set()
        for rule in self.rules:
            clause_vars = set()
            for var_name, term_name in rule.antecedent:
                if var_name in clause_vars:
                    raise FisConfigError(
                        f"rule has two clauses for variable {var_name!r}"
                    )
                clause_vars.add(var_name)
                var = by_name.get(var_name)
                if var is None:
                    raise FisConfigError(f"rule references unknown variable {var_name!r}")
                var.term(term_name)  # raises on unknown term
            key = frozenset(rule.antecedent)
            if key in seen_antecedents:
                raise FisConfigError(
                    f"two rules share the antecedent {sorted(rule.antecedent)}"
                )
            seen_antecedents.add(key)
            if not lo <= rule.consequent <= hi:
                raise FisConfigError(
                    f"rule consequent {rule.consequent} outside output domain [{lo}, {hi}]"
                )

    def variable(self, name: str) -> FuzzyVariable:
        var = self._vars.get(name)
        if var is None:
            raise FisConfigError(f"unknown variable {name!r}")
        return var

    def check_domain(self, values: Mapping[str, float]) -> None:
        for var in self.inputs:
            if var.name not in values:
                raise OutOfDomainError(f"no value supplied for variable {var.name!r}")
            x = values[var.name]
            if not var.contains(x):
                lo, hi = var.domain
                raise OutOfDomainError(
                    f"{var.name} = {x} outside domain [{lo}, {hi}]"
                )


def firing_strength(fis: SugenoFis, rule: Rule, values: Mapping[str, float]) -> float:
    """Conjunction of the rule's clause membership degrees for the given input.

    An empty antecedent yields 1.  Unknown variable or term names raise
    FisConfigError.
    """
    strength = 1.0
    for var_name, term_name in rule.antecedent:
        var = fis.variable(var_name)
        if var_name not in values:
            raise OutOfDomainError(f"no value supplied for variable {var_name!r}")
        degree = var.term(term_name).degree(values[var_name])
        if fis.and_operator == "min":
            strength = min(strength, degree)
        else:
            strength = strength * degree
        if strength == 0.0:
            return 0.0
    return strength


def infer(fis: SugenoFis, values: Mapping[str, float]) -> InferenceResult:
    """Run Sugeno inference for one crisp input assignment.

    raw = sum(w_i * c_i) / sum(w_i) over the rules with positive firing
    strength.  When no rule fires the result is raw = 0 with a zero rule
    count, the anomaly encoding.  Out-of-domain inputs raise OutOfDomainError
    rather than being clamped, and an empty rule base raises FisConfigError.

    The result is independent of rule order: the sums are accumulated with
    math.fsum, which returns the correctly rounded sum regardless of operand
    order, and the weighted average is clamped into the exact consequent range
    of the fired rules to keep float rounding from leaking outside it.
    """
    if not fis.rules:
        raise FisConfigError("cannot infer with an empty rule base")
    fis.check_domain(values)

    weights: list[float] = []
    contributions: list[float] = []
    fired = 0
    only_consequent = 0.0
    c_min = math.inf
    c_max = -math.inf
    for rule in fis.rules:
        w = firing_strength(fis, rule, values)
        if w > 0.0:
            fired += 1
            only_consequent = rule.consequent
            weights.append(w)
            contributions.append(w * rule.consequent)
            c_min = min(c_min, rule.consequent)
            c_max = max(c_max, rule.consequent)

    if fired == 0:
        return InferenceResult(raw=0.0, fired_rule_count=0, total_strength=0.0)

    total = math.fsum(weights)
    if fired == 1:
        return InferenceResult(raw=only_consequent, fired_rule_count=1, total_strength=total)

    raw = math.fsum(contributions) / total
    raw = min(max(raw, c_min), c_max)
    return InferenceResult(raw=raw, fired_rule_count=fired, total_strength=total)
