"""Pseudo-norms: symmetric, subadditive, point-separating functionals.

A pseudo-norm drops homogeneity, which admits local-space constructions of
the form ``sum_n 2^-n rho_n/(1 + rho_n)`` alongside ordinary norms.  The
concrete spaces used throughout the package (absolute value on scalars,
quadrature L2 on torus grids, sup-in-time norms on trajectories) are all
instances of :class:`PseudoNormedSpace`.

Values that escape floating-point range are reported with the distinguished
:data:`OVERFLOW` outcome instead of ``inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Overflow",
    "OVERFLOW",
    "is_overflow",
    "KindMismatchError",
    "PseudoNormedSpace",
    "GradedSeminormFamily",
    "eval_pseudo_norm",
    "local_pseudo_norm",
    "AxiomProbeReport",
    "axiom_probe",
    "scalar_abs_space",
]


class Overflow:
    """Marker for a pseudo-norm value beyond floating-point range."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OVERFLOW"


OVERFLOW = Overflow()


def is_overflow(value) -> bool:
    return isinstance(value, Overflow)


class KindMismatchError(TypeError):
    """Element handed to a space of a different element kind."""


def _is_scalar(x) -> bool:
    return isinstance(
        x, (int, float, complex, np.integer, np.floating, np.complexfloating)
    ) and not isinstance(x, bool)


def _is_grid_function(x) -> bool:
    return hasattr(x, "values") and hasattr(x, "grid_size")


def _is_trajectory(x) -> bool:
    return hasattr(x, "times") and hasattr(x, "states")


_KIND_PREDICATES: dict[str, Callable] = {
    "scalar": _is_scalar,
    "grid_function": _is_grid_function,
    "time_trajectory": _is_trajectory,
}


@dataclass(frozen=True)
class PseudoNormedSpace:
    """A vector space together with a pseudo-norm evaluation rule.

    ``eval`` maps an element to a real number; for a lawful space the value
    is nonnegative, symmetric under negation, subadditive, and vanishes
    exactly on the zero element.  ``zero`` produces the zero element, used
    when sequences over this space need padding.
    """

    label: str
    eval: Callable = field(repr=False)
    element_kind: str = "scalar"
    zero: Callable = field(default=lambda: 0.0, repr=False)

    def __post_init__(self):
        if self.element_kind not in _KIND_PREDICATES:
            raise ValueError(f"unknown element kind {self.element_kind!r}")

    def norm(self, x):
        return eval_pseudo_norm(self, x)


@dataclass(frozen=True)
class GradedSeminormFamily:
    """An ordered family rho_1 <= rho_2 <= ... of seminorms.

    The family is combined into a single bounded pseudo-norm by
    :func:`local_pseudo_norm` with weights 2^-n, n = 1, 2, ...
    """

    seminorms: tuple

    def __post_init__(self):
        object.__setattr__(self, "seminorms", tuple(self.seminorms))
        if not self.seminorms:
            raise ValueError("seminorm family must be nonempty")


def eval_pseudo_norm(space: PseudoNormedSpace, x):
    """Evaluate the space's pseudo-norm at ``x``.

    Returns a float, or :data:`OVERFLOW` when the evaluation escapes
    floating-point range.  Raises :class:`KindMismatchError` when ``x`` is
    not of the space's element kind.  The value is returned as computed;
    lawfulness (nonnegativity etc.) is checked by :func:`axiom_probe`.
    """
    if not _KIND_PREDICATES[space.element_kind](x):
        raise KindMismatchError(
            f"space {space.label!r} expects {space.element_kind} elements, "
            f"got {type(x).__name__}"
        )
    value = float(space.eval(x))
    if not math.isfinite(value):
        return OVERFLOW
    return value


def local_pseudo_norm(family: GradedSeminormFamily, x) -> float:
    """Combine a graded seminorm family into one pseudo-norm value.

    Returns ``sum_n 2^-n rho_n(x)/(1 + rho_n(x))`` over n = 1..len(family),
    always a number in [0, 1).
    """
    total = 0.0
    for n, rho in enumerate(family.seminorms, start=1):
        value = float(rho(x))
        total += 2.0 ** (-n) * value / (1.0 + value)
    return total


@dataclass
class AxiomProbeReport:
    """Outcome of randomized pseudo-norm axiom checks."""

    space_label: str
    trials: int
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations


def axiom_probe(
    space: PseudoNormedSpace,
    sampler: Callable,
    trials: int,
    rng: np.random.Generator | None = None,
    rel_tol: float = 1e-12,
) -> AxiomProbeReport:
    """Probe symmetry, subadditivity and nonnegativity on random elements.

    ``sampler(rng)`` must return a random element of the space.  Each trial
    draws a pair (x, y) and checks

      * eval(x) is finite and >= 0,
      * |eval(-x) - eval(x)| <= rel_tol * (1 + eval(x)),
      * eval(x + y) <= eval(x) + eval(y) + rel_tol * (eval(x) + eval(y)).

    Violations are collected in the report, never raised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    violations = []
    for trial in range(trials):
        x = sampler(rng)
        y = sampler(rng)
        nx = eval_pseudo_norm(space, x)
        ny = eval_pseudo_norm(space, y)
        if is_overflow(nx) or is_overflow(ny):
            violations.append({"trial": trial, "law": "finite", "value": "overflow"})
            continue
        if nx < 0.0 or ny < 0.0:
            violations.append(
                {"trial": trial, "law": "nonnegative", "value": min(nx, ny)}
            )
        n_negx = eval_pseudo_norm(space, -x)
        if is_overflow(n_negx) or abs(n_negx - nx) > rel_tol * (1.0 + abs(nx)):
            violations.append(
                {"trial": trial, "law": "symmetry", "value": (nx, n_negx)}
            )
        nxy = eval_pseudo_norm(space, x + y)
        if is_overflow(nxy) or nxy > nx + ny + rel_tol * (nx + ny):
            violations.append(
                {"trial": trial, "law": "subadditivity", "value": (nxy, nx + ny)}
            )
    return AxiomProbeReport(space.label, trials, violations)


def scalar_abs_space(label: str = "abs") -> PseudoNormedSpace:
    """The real line with absolute value, the simplest lawful space."""
    return PseudoNormedSpace(
        label=label, eval=abs, element_kind="scalar", zero=lambda: 0.0
    )
