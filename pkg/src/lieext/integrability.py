"""Periods of the equivariant form against a lattice: the go/no-go test.

The extension built from a 2-cocycle exists at the group level exactly when
every period of the equivariant form over the user-supplied generators of
second homology lands in the lattice.  Periods are quadrature values, so
the lattice test runs with its tolerance inflated by an order-halving error
estimate, and a verdict too close to the decision boundary is reported as
indeterminate rather than forced.

The fiber over a non-simply-connected group is described by the restriction
of the path cocycle to loops: pairwise cocycle values, their antisymmetrized
commutators, and the commutators reduced modulo the lattice.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    DEFAULT_TOL_LAT,
    Lattice,
    LatticeMembership,
    lattice_member,
    reduce_mod_lattice,
)
from .errors import NotALoopError, OpenChainError
from .geometry import (
    DEFAULT_QUAD_ORDER,
    EquivariantForm,
    Surface2Chain,
    cancel_boundary_edges,
    path_cocycle,
    surface_integral,
)
from .groups import GroupPath, MatrixGroup, coordinate_path


@dataclass(frozen=True)
class CycleSet:
    """Named 2-chains asserted by the user to be cycles generating H_2(G)."""

    generators: Tuple[Tuple[str, Surface2Chain], ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))


def assert_cycle_closed(group: MatrixGroup, chain: Surface2Chain, name: str = "cycle"):
    """Raise OpenChainError unless the chain's boundary edges cancel."""
    tol = 1e4 * group.membership_tol
    leftovers = cancel_boundary_edges(chain, tol)
    if leftovers:
        raise OpenChainError(
            f"{name!r} has {len(leftovers)} uncancelled boundary edge(s); "
            "it is not a 2-cycle"
        )


def period(
    form: EquivariantForm,
    cycle: Surface2Chain,
    quad_order: int = DEFAULT_QUAD_ORDER,
    name: str = "cycle",
    check_closure: bool = True,
) -> np.ndarray:
    """Integral of the form over a closed 2-chain (not reduced mod Gamma)."""
    if check_closure:
        assert_cycle_closed(form.group, cycle, name)
    return surface_integral(form, cycle, quad_order)


@dataclass(frozen=True)
class GeneratorVerdict:
    name: str
    period: np.ndarray
    membership: LatticeMembership
    error_estimate: float
    tol_used: float

    def as_dict(self):
        return {
            "generator": self.name,
            "period": [float(v) for v in self.period],
            "verdict": self.membership.verdict,
            "coefficients": [int(k) for k in self.membership.coefficients],
            "residual": self.membership.residual,
            "error_estimate": self.error_estimate,
            "tolerance_used": self.tol_used,
        }


@dataclass(frozen=True)
class IntegrabilityReport:
    """Per-generator periods and verdicts plus the overall conclusion."""

    generators: Tuple[GeneratorVerdict, ...]
    overall: str  # "integrable" | "not_integrable" | "indeterminate"
    quad_order: int
    assumption: str = (
        "the supplied generators are assumed to span H_2(G); completeness "
        "is not verified internally"
    )
    pi1_table: Optional["Pi1CocycleTable"] = None

    def as_dict(self):
        out = {
            "overall": self.overall,
            "quad_order": self.quad_order,
            "assumption": self.assumption,
            "generators": [g.as_dict() for g in self.generators],
        }
        if self.pi1_table is not None:
            out["pi1"] = self.pi1_table.as_dict()
        return out


def _combine(verdicts: Sequence[str]) -> str:
    if any(v == "not_member" for v in verdicts):
        return "not_integrable"
    if any(v == "indeterminate" for v in verdicts):
        return "indeterminate"
    return "integrable"


def check_integrability(
    form: EquivariantForm,
    cycles: CycleSet,
    lattice: Lattice,
    quad_order: int = DEFAULT_QUAD_ORDER,
    tol_lat: float = DEFAULT_TOL_LAT,
) -> IntegrabilityReport:
    """Period-in-lattice test over every generator.

    The membership tolerance is inflated per generator by the difference
    between the full-order and half-order quadrature values.  An empty
    generator set (simply connected group with trivial H_2) is integrable
    for every cocycle.
    """
    results = []
    for name, chain in cycles.generators:
        assert_cycle_closed(form.group, chain, name)
        value = surface_integral(form, chain, quad_order)
        coarse = surface_integral(form, chain, max(1, quad_order // 2))
        err = float(np.max(np.abs(value - coarse)))
        tol = tol_lat + err
        membership = lattice_member(lattice, value, tol)
        results.append(
            GeneratorVerdict(
                name=name,
                period=value,
                membership=membership,
                error_estimate=err,
                tol_used=tol,
            )
        )
    overall = _combine([r.membership.verdict for r in results]) if results else "integrable"
    return IntegrabilityReport(
        generators=tuple(results), overall=overall, quad_order=quad_order
    )


# ---------------------------------------------------------------------------
# The fiber over pi_1: restriction of the path cocycle to loops


@dataclass(frozen=True)
class Pi1CocycleTable:
    """Pairwise path-cocycle values over closed loops and their commutators."""

    names: Tuple[str, ...]
    values: np.ndarray  # (k, k, m): cocycle value for (loop_i, loop_j)
    commutators: np.ndarray  # (k, k, m): values[i,j] - values[j,i]
    commutators_mod: Optional[np.ndarray]  # reduced mod Gamma, or None
    commutator_memberships: Optional[list]  # verdicts per ordered pair

    def value(self, i: int, j: int) -> np.ndarray:
        return self.values[i, j]

    def commutator(self, i: int, j: int) -> np.ndarray:
        return self.commutators[i, j]

    def as_dict(self):
        out = {
            "loops": list(self.names),
            "values": self.values.tolist(),
            "commutators": self.commutators.tolist(),
        }
        if self.commutators_mod is not None:
            out["commutators_mod_lattice"] = self.commutators_mod.tolist()
            out["commutator_in_lattice"] = [
                [mem.verdict for mem in row] for row in self.commutator_memberships
            ]
        return out


def torus_winding_loop(group: MatrixGroup, winding: Sequence[int]) -> GroupPath:
    """Straight loop with the given integer winding numbers on a torus."""
    w = np.asarray(winding, dtype=float)
    if np.max(np.abs(w - np.round(w))) > 0:
        raise NotALoopError(f"winding numbers must be integers, got {winding}")
    return coordinate_path(group, lambda t: t * w)


def pi1_cocycle_table(
    form: EquivariantForm,
    loops: Sequence[Tuple[str, GroupPath]],
    lattice: Optional[Lattice] = None,
    quad_order: int = DEFAULT_QUAD_ORDER,
    tol_lat: float = DEFAULT_TOL_LAT,
) -> Pi1CocycleTable:
    """Path-cocycle table over closed based loops.

    Every loop must close at the identity; the cocycle of a pair is the
    product-triangle integral, which equals the universal-cover computation
    because the form pulls back along the covering projection.
    """
    group = form.group
    names = []
    paths = []
    for name, loop in loops:
        gap = float(np.max(np.abs(loop(1.0) - loop(0.0))))
        base = float(np.max(np.abs(loop(0.0) - group.identity)))
        if gap > 1e4 * group.membership_tol or base > 1e4 * group.membership_tol:
            raise NotALoopError(f"loop {name!r} does not close at the identity")
        names.append(name)
        paths.append(loop)
    k = len(paths)
    m = form.cochain.coeff_dim
    values = np.zeros((k, k, m))
    for i in range(k):
        for j in range(k):
            values[i, j] = path_cocycle(form, paths[i], paths[j], quad_order)
    commutators = values - np.transpose(values, (1, 0, 2))
    if lattice is None:
        return Pi1CocycleTable(tuple(names), values, commutators, None, None)
    reduced = np.zeros_like(commutators)
    memberships = []
    for i in range(k):
        row = []
        for j in range(k):
            reduced[i, j] = reduce_mod_lattice(lattice, commutators[i, j])
            row.append(lattice_member(lattice, commutators[i, j], tol_lat))
        memberships.append(row)
    return Pi1CocycleTable(tuple(names), values, commutators, reduced, memberships)
