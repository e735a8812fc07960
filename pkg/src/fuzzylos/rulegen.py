"""Construct a rule base for a two-input LoS system from a region model.

For every (flow term, speed term) pair the generator samples a grid over the
pair's half-cut core, the sub-rectangle where both membership degrees are at
least 0.5, and asks the region oracle for the level at each sample.  Pairs
with no labeled sample produce no rule and stay anomaly zones; pairs whose
labeled samples agree on one level (up to the agreement threshold) produce a
rule with that level as the constant consequent; anything worse is a hard
conflict, the sign of membership functions that do not fit the regions.
"""

from __future__ import annotations

from collections import Counter

from .engine import FuzzyVariable, Rule, TrapezoidMF
from .regions import LosRegionModel, oracle_label


class RuleConflictError(ValueError):
    """A term pair's labeled samples split below the agreement threshold."""

    def __init__(self, flow_term: str, speed_term: str, counts: dict[int, int], agreement: float):
        self.flow_term = flow_term
        self.speed_term = speed_term
        self.counts = dict(counts)
        split = ", ".join(f"LoS {level}: {n}" for level, n in sorted(counts.items()))
        super().__init__(
            f"term pair ({flow_term}, {speed_term}) splits across levels ({split}) "
            f"below the agreement threshold {agreement}"
        )


def half_cut(mf: TrapezoidMF) -> tuple[float, float]:
    """The closed interval where the membership degree is >= 0.5."""
    return ((mf.a + mf.b) / 2.0, (mf.c + mf.d) / 2.0)


def _grid(lo: float, hi: float, steps: int) -> list[float]:
    if steps < 2 or lo == hi:
        return [lo]
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


def generate_rules(
    model: LosRegionModel,
    flow_var: FuzzyVariable,
    speed_var: FuzzyVariable,
    grid: int = 25,
    agreement: float = 0.85,
) -> tuple[Rule, ...]:
    """Derive one rule per coherent (flow term, speed term) pair.

    ``grid`` is the number of sample points per axis across each pair's core;
    the core endpoints are always sampled.  ``agreement`` must lie in
    (0.5, 1]: the majority level must account for at least that fraction of
    the labeled samples, otherwise RuleConflictError names the pair.

    The rule order is flow terms outer, speed terms inner, both in
    declaration order.
    """
    if not 0.5 < agreement <= 1.0:
        raise ValueError(f"agreement must lie in (0.5, 1], got {agreement}")
    if grid < 2:
        raise ValueError(f"grid resolution must be at least 2, got {grid}")

    rules: list[Rule] = []
    for flow_term, flow_mf in flow_var.terms:
        flow_samples = _grid(*half_cut(flow_mf), grid)
        for speed_term, speed_mf in speed_var.terms:
            speed_samples = _grid(*half_cut(speed_mf), grid)
            counts: Counter[int] = Counter()
            for flow in flow_samples:
                for speed in speed_samples:
                    if not model.contains(flow, speed):
                        continue
                    level = oracle_label(model, flow, speed)
                    if level is not None:
                        counts[level] += 1
            if not counts:
                continue
            level, majority = counts.most_common(1)[0]
            if majority < agreement * sum(counts.values()):
                raise RuleConflictError(flow_term, speed_term, counts, agreement)
            rules.append(
                Rule(
                    antecedent=((flow_var.name, flow_term), (speed_var.name, speed_term)),
                    consequent=float(level),
                )
            )
    return tuple(rules)
