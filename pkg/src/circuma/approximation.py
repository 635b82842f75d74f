"""Diameter-threshold filtering and nested finitely connected approximations."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .domain import Component, DomainSpec, Point
from .errors import BadThresholds


class AllComponentsDropped(UserWarning):
    """Every complement component was at or below the threshold."""


def filter_components(dom: DomainSpec, delta: float) -> DomainSpec:
    """Keep exactly the complement components of diameter > delta."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    kept = tuple(c for c in dom.components if c.diameter > delta)
    if not kept and dom.components:
        warnings.warn(f"no component has diameter > {delta:g}", AllComponentsDropped, stacklevel=2)
    return DomainSpec(kept, dom.contains_infinity, f"{dom.name}|diam>{delta:g}" if dom.name else f"diam>{delta:g}")


@dataclass
class ApproximationSequence:
    base: DomainSpec
    thresholds: list
    domains: list
    residual: list = field(default_factory=list)
    first_stage: dict = field(default_factory=dict)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(d.components) for d in self.domains)


def _nested(inner: Sequence[Component], outer: Sequence[Component]) -> bool:
    outer_set = set(outer)
    return all(c in outer_set for c in inner)


def approximation_sequence(dom: DomainSpec, thresholds: Sequence[float]) -> ApproximationSequence:
    """Apply the filter for each threshold and verify the nesting of complements.

    A larger complement means a smaller domain, so the stage complements grow
    with n while each stays inside the base complement.  ``first_stage`` maps
    each non-point component index to the first stage containing it (None if
    it never appears); ``residual`` lists the base components no stage keeps.
    """
    th = [float(t) for t in thresholds]
    if not th or any(t <= 0 for t in th) or any(b >= a for a, b in zip(th, th[1:])):
        raise BadThresholds("thresholds must be positive and strictly decreasing")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AllComponentsDropped)
        doms = [filter_components(dom, t) for t in th]
    for n in range(len(doms)):
        nxt = doms[n + 1].components if n + 1 < len(doms) else dom.components
        if not _nested(doms[n].components, nxt):
            raise AssertionError(f"stage {n} complement is not contained in the next one")
        dropped = [c.diameter for c in dom.components if c not in set(doms[n].components)]
        if doms[n].components and dropped:
            assert min(c.diameter for c in doms[n].components) > th[n] >= max(dropped)
    first = {}
    for k, c in enumerate(dom.components):
        if isinstance(c, Point):
            continue
        first[k] = next((n for n, d in enumerate(doms) if c in set(d.components)), None)
    last = set(doms[-1].components)
    residual = [c for c in dom.components if c not in last]
    return ApproximationSequence(dom, th, doms, residual, first)
