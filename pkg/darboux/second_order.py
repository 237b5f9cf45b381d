"""
Second-order SUSY transformations.

Non-confluent transformations use two transformation functions u1, u2 at
distinct factorization constants and their Wronskian W(u1, u2). Confluent
ones use a single u and W_c = c + int_{x0}^x u^2. Second derivatives of the
transformation functions never appear: they are eliminated through the
seed Schrodinger equation, so W', W'' and W''' are exact expressions in
u, u' and V0.
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from core.grid import Grid, GridFunction, crossing_nodes, same_grid
from darboux.wronskian import wronskian2
from errors import KernelInput, TransformError
from logger_config import logger
from settings import get_settings

# energies closer than this (relative) are treated as equal
ENERGY_MATCH = 1e-10
# |W(u, psi)| relative to its natural scale below which psi is proportional to u
PROPORTIONAL = 1e-8


class TransformMode(str, Enum):
    NON_CONFLUENT = "NonConfluent"
    CONFLUENT = "Confluent"


def _same_energy(a: complex, b: complex) -> bool:
    return abs(complex(a) - complex(b)) <= ENERGY_MATCH * (1 + abs(complex(b)))


def _with_energy(u: GridFunction, alpha: Optional[complex], name: str) -> Tuple[GridFunction, complex]:
    if alpha is None:
        if u.energy is None:
            raise TransformError(f"{name} has no factorization constant")
        return u, complex(u.energy)
    alpha = complex(alpha)
    if u.energy is not None and not _same_energy(u.energy, alpha):
        raise TransformError(
            f"{name} solves the seed equation at a different energy",
            {"declared": [alpha.real, alpha.imag], "attached": [u.energy.real, u.energy.imag]},
        )
    return replace(u, energy=alpha), alpha


@dataclass(frozen=True, eq=False)
class TransformationSpec:
    """Transformation functions and constants of one second-order transformation"""

    mode: TransformMode
    u1: Optional[GridFunction] = None
    u2: Optional[GridFunction] = None
    alpha1: Optional[complex] = None
    alpha2: Optional[complex] = None
    u: Optional[GridFunction] = None
    alpha: Optional[complex] = None
    c: Optional[complex] = None
    x_anchor: Optional[float] = None
    origin: Optional[dict] = None

    @classmethod
    def non_confluent(cls, u1: GridFunction, u2: GridFunction, alpha1=None, alpha2=None,
                      origin: Optional[dict] = None) -> "TransformationSpec":
        same_grid(u1, u2)
        u1, alpha1 = _with_energy(u1, alpha1, "u1")
        u2, alpha2 = _with_energy(u2, alpha2, "u2")
        if _same_energy(alpha1, alpha2):
            raise TransformError(
                "equal factorization constants need the confluent transformation",
                {"alpha": [alpha1.real, alpha1.imag]},
            )
        return cls(TransformMode.NON_CONFLUENT, u1=u1, u2=u2, alpha1=alpha1, alpha2=alpha2, origin=origin)

    @classmethod
    def confluent(cls, u: GridFunction, c: complex, x_anchor: float = 0.0, alpha=None,
                  origin: Optional[dict] = None) -> "TransformationSpec":
        u, alpha = _with_energy(u, alpha, "u")
        try:
            u.grid.index_of(x_anchor)
        except ValueError as e:
            raise TransformError("confluent anchor must be a grid node", {"x_anchor": x_anchor}) from e
        return cls(TransformMode.CONFLUENT, u=u, alpha=alpha, c=complex(c),
                   x_anchor=float(x_anchor), origin=origin)

    @property
    def is_confluent(self) -> bool:
        return self.mode == TransformMode.CONFLUENT

    @property
    def grid(self) -> Grid:
        return self.u.grid if self.is_confluent else self.u1.grid

    @property
    def functions(self) -> List[GridFunction]:
        return [self.u] if self.is_confluent else [self.u1, self.u2]

    @property
    def constants(self) -> List[complex]:
        return [self.alpha] if self.is_confluent else [self.alpha1, self.alpha2]

    def swapped(self) -> "TransformationSpec":
        """The same transformation with the roles of u1 and u2 exchanged"""
        if self.is_confluent:
            return self
        return replace(self, u1=self.u2, u2=self.u1, alpha1=self.alpha2, alpha2=self.alpha1)

    def to_dict(self) -> dict:
        data = {"mode": self.mode.value}
        if self.is_confluent:
            data.update(alpha=self.alpha, c=self.c, x_anchor=self.x_anchor)
        else:
            data.update(alpha1=self.alpha1, alpha2=self.alpha2)
        if self.origin is not None:
            data["origin"] = self.origin
        return data


@dataclass(frozen=True, eq=False)
class TransformResult:
    V1: GridFunction
    W: GridFunction
    spec: TransformationSpec
    regular: bool
    margin: float
    singular_x: Tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "regular": self.regular,
            "margin": self.margin,
            "singular_x": list(self.singular_x),
        }


def confluent_wc(u: GridFunction, c: complex, x_anchor: float) -> GridFunction:
    """W_c(x) = c + int_{x_anchor}^x u^2; W_c' = u^2.

    Each cell is integrated with the cubic Hermite rule on u^2 and its exact
    derivative 2 u u', so the quadrature error varies smoothly from node to
    node and survives a finite-difference second derivative.
    """
    grid = u.grid
    k = grid.index_of(x_anchor)
    h = grid.h
    sq = u.values * u.values
    dsq = 2.0 * u.values * u.derivs
    cells = 0.5 * h * (sq[:-1] + sq[1:]) + (h * h / 12.0) * (dsq[:-1] - dsq[1:])
    integral = np.concatenate(([0j], np.cumsum(cells)))
    values = complex(c) + integral - integral[k]
    return GridFunction(grid, values, sq, flags=u.flags)


def _wronskian_jet(V0: GridFunction, spec: TransformationSpec):
    """W with W', plus W'' and W''' eliminated through the seed equation"""
    v0 = V0.values
    if spec.is_confluent:
        u, du, a = spec.u.values, spec.u.derivs, spec.alpha
        W = confluent_wc(spec.u, spec.c, spec.x_anchor)
        d2 = 2 * u * du
        d3 = 2 * du * du + 2 * (v0 - a) * u * u
        return W, d2, d3

    u1, du1, u2, du2 = spec.u1.values, spec.u1.derivs, spec.u2.values, spec.u2.derivs
    a1, a2 = spec.alpha1, spec.alpha2
    W = wronskian2(spec.u1, spec.u2)
    d2 = (a1 - a2) * (du1 * u2 + u1 * du2)
    d3 = (a1 - a2) * ((2 * v0 - a1 - a2) * u1 * u2 + 2 * du1 * du2)
    return W, d2, d3


def singular_nodes(W: GridFunction) -> np.ndarray:
    """Interior nodes where W passes through zero"""
    return crossing_nodes(W.values, floor=get_settings().regularity_tol)


def second_order_potential(V0: GridFunction, spec: TransformationSpec) -> TransformResult:
    """V1 = V0 - 2 (log W)'' computed as V0 - 2 (W'' W - W'^2) / W^2"""
    same_grid(V0, *spec.functions)
    W, d2, d3 = _wronskian_jet(V0, spec)
    w, d1 = W.values, W.derivs

    with np.errstate(divide="ignore", invalid="ignore"):
        ell = d1 / w
        dell = d2 / w - ell * ell
        ddell = d3 / w - d2 * d1 / (w * w) - 2 * ell * dell
        values = V0.values - 2 * dell
        derivs = V0.derivs - 2 * ddell

    bad = ~np.isfinite(values) | W.flagged | V0.flagged
    values = np.where(bad, np.nan, values)
    derivs = np.where(bad, np.nan, derivs)
    V1 = GridFunction(V0.grid, values, derivs, exact=V0.exact and W.exact,
                      flags=bad if bad.any() else None)

    nodes = singular_nodes(W)
    interior_ok = bool(np.all(np.isfinite(values[1:-1])))
    regular = nodes.size == 0 and interior_ok

    mags = np.abs(w[1:-1])
    mags = mags[np.isfinite(mags)]
    margin = float(mags.min() / mags.max()) if mags.size and mags.max() > 0 else 0.0

    singular_x = tuple(float(x) for x in V0.grid.x[nodes])
    logger.info("transform_built", mode=spec.mode.value, regular=regular, margin=margin)
    if not regular:
        logger.warning("transform_singular", zeros=list(singular_x), interior_finite=interior_ok)
    return TransformResult(V1=V1, W=W, spec=spec, regular=regular, margin=margin, singular_x=singular_x)


def _is_proportional(u: GridFunction, psi: GridFunction) -> bool:
    wr = u.values * psi.derivs - u.derivs * psi.values
    scale = np.abs(u.values) * np.abs(psi.derivs) + np.abs(u.derivs) * np.abs(psi.values)
    finite = np.isfinite(wr) & np.isfinite(scale)
    top = float(np.max(scale[finite])) if finite.any() else 0.0
    if top == 0.0:
        return True
    return float(np.max(np.abs(wr[finite]))) <= PROPORTIONAL * top


def _quotient(u: GridFunction, W: GridFunction, E: complex) -> GridFunction:
    """u / W with its exact derivative u'/W - u W'/W^2"""
    with np.errstate(divide="ignore", invalid="ignore"):
        values = u.values / W.values
        derivs = u.derivs / W.values - u.values * W.derivs / (W.values * W.values)
    bad = ~np.isfinite(values)
    return GridFunction(W.grid, values, derivs, energy=E, flags=bad if bad.any() else None)


def _kernel_image(psi: GridFunction, E: complex, on_kernel: str, which: str) -> GridFunction:
    zero = GridFunction(psi.grid, np.zeros(psi.grid.n), np.zeros(psi.grid.n), energy=E)
    logger.info("kernel_input", energy=str(E), function=which)
    if on_kernel == "raise":
        raise KernelInput(
            f"solution is proportional to {which}; its image is zero",
            image=zero,
            details={"energy": [E.real, E.imag], "function": which},
        )
    return zero


def second_order_map(
    psi: GridFunction,
    E: complex,
    spec: TransformationSpec,
    W: GridFunction,
    form: str = "first",
    on_kernel: str = "raise",
) -> GridFunction:
    """Image of a seed solution at energy E under the second-order operator.

    ``form`` picks between the two equivalent expressions, built on W(u2, psi)
    ("first") or on W(u1, psi) ("second"). At a factorization constant the
    image of an independent solution is u2/W, u1/W or u/W_c up to a constant;
    solutions in the kernel raise KernelInput unless ``on_kernel="zero"``.
    """
    if on_kernel not in ("raise", "zero"):
        raise ValueError(f"on_kernel must be 'raise' or 'zero', got {on_kernel!r}")
    if form not in ("first", "second"):
        raise ValueError(f"form must be 'first' or 'second', got {form!r}")
    grid = same_grid(psi, W, *spec.functions)
    E = complex(E)
    p, dp = psi.values, psi.derivs
    w, dw = W.values, W.derivs

    if spec.is_confluent:
        u = spec.u
        a = spec.alpha
        if _same_energy(E, a):
            if _is_proportional(u, psi):
                return _kernel_image(psi, E, on_kernel, "u")
            return _quotient(u, W, E)
        with np.errstate(divide="ignore", invalid="ignore"):
            A = p * u.derivs - dp * u.values
            dA = (E - a) * p * u.values
            values = (a - E) * p + A / w * u.values
            derivs = (a - E) * dp + (dA / w - A * dw / (w * w)) * u.values + A / w * u.derivs
    else:
        a1, a2 = spec.alpha1, spec.alpha2
        if _same_energy(E, a1):
            if _is_proportional(spec.u1, psi):
                return _kernel_image(psi, E, on_kernel, "u1")
            return _quotient(spec.u2, W, E)
        if _same_energy(E, a2):
            if _is_proportional(spec.u2, psi):
                return _kernel_image(psi, E, on_kernel, "u2")
            return _quotient(spec.u1, W, E)

        if form == "first":
            other, partner, a_other, a_partner = spec.u2, spec.u1, a2, a1
        else:
            other, partner, a_other, a_partner = spec.u1, spec.u2, a1, a2
        with np.errstate(divide="ignore", invalid="ignore"):
            A = other.values * dp - other.derivs * p
            dA = (a_other - E) * other.values * p
            values = (E - a_other) * p + (a1 - a2) * A / w * partner.values
            derivs = (E - a_other) * dp + (a1 - a2) * (
                (dA / w - A * dw / (w * w)) * partner.values + A / w * partner.derivs
            )

    bad = ~np.isfinite(values) | W.flagged
    return GridFunction(grid, np.where(bad, np.nan, values), np.where(bad, np.nan, derivs),
                        energy=E, flags=bad if bad.any() else None)


def reverse_transform(result: TransformResult) -> GridFunction:
    """Undo a regular transformation, recovering the seed potential from V1.

    Non-confluent: transform V1 with u2/W at alpha1 and u1/W at alpha2.
    Confluent: transform with u/W_c at alpha and constant -1/c at the same anchor.
    """
    if not result.regular:
        raise TransformError("cannot reverse a singular transformation",
                             {"singular_x": list(result.singular_x)})
    spec = result.spec
    W = result.W
    if spec.is_confluent:
        if spec.c == 0:
            raise TransformError("confluent constant c = 0 has no reverse")
        phi = _quotient(spec.u, W, spec.alpha)
        back = TransformationSpec.confluent(phi, -1.0 / spec.c, spec.x_anchor)
    else:
        phi1 = _quotient(spec.u2, W, spec.alpha1)
        phi2 = _quotient(spec.u1, W, spec.alpha2)
        back = TransformationSpec.non_confluent(phi1, phi2)

    recovered = second_order_potential(result.V1, back)
    logger.info("transform_reversed", mode=spec.mode.value, regular=recovered.regular)
    return recovered.V1
