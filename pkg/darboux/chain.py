"""
Reducibility check: try to split a second-order transformation into two
first-order steps and report what goes wrong with each ordering.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from core.grid import BoundaryProblem, GridFunction, crossing_nodes
from core.signature import boundary_signature
from darboux.first_order import GUARD_THRESHOLD, first_order_map, first_order_potential
from darboux.second_order import TransformationSpec
from errors import AmbiguousAsymptotics
from logger_config import logger


@dataclass(frozen=True)
class ChainStep:
    order: str
    alpha: complex
    intermediate_regular: bool
    dirichlet_kept: bool
    intermediate_real: bool
    second_regular: bool = True
    singular_x: Tuple[float, ...] = ()

    @property
    def splits(self) -> bool:
        return self.intermediate_regular and self.dirichlet_kept and self.second_regular

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "alpha": self.alpha,
            "intermediate_regular": self.intermediate_regular,
            "dirichlet_kept": self.dirichlet_kept,
            "intermediate_real": self.intermediate_real,
            "second_regular": self.second_regular,
            "singular_x": list(self.singular_x),
        }


@dataclass(frozen=True)
class ChainSplit:
    steps: List[ChainStep] = field(default_factory=list)

    @property
    def splits(self) -> bool:
        return any(step.splits for step in self.steps)

    def notes(self) -> List[str]:
        out = []
        for step in self.steps:
            if step.splits:
                out.append(f"chain split: {step.order} gives a regular intermediate keeping the boundary conditions")
            elif not step.intermediate_regular:
                where = ", ".join(f"{x:.6g}" for x in step.singular_x)
                out.append(f"chain split: {step.order} intermediate singular at x = {where}")
            elif not step.second_regular:
                out.append(f"chain split: {step.order} second step function has a node")
            else:
                out.append(f"chain split: {step.order} intermediate regular but leaves the Dirichlet problem")
        return out

    def to_dict(self) -> dict:
        return {"splits": self.splits, "steps": [s.to_dict() for s in self.steps]}


def _keeps_dirichlet(u: GridFunction, problem: BoundaryProblem) -> bool:
    # mapped eigenfunctions keep a finite-endpoint zero only if u vanishes there
    try:
        sig = boundary_signature(u, problem)
    except AmbiguousAsymptotics:
        return False
    left = sig.vanishes_at_left if problem.left_is_finite else True
    right = sig.vanishes_at_right if problem.right_is_finite else True
    return left and right


def _step(V0: GridFunction, u: GridFunction, partner: Optional[GridFunction], order: str,
          problem: BoundaryProblem) -> ChainStep:
    nodes = crossing_nodes(u.values, floor=GUARD_THRESHOLD)
    second_regular = True
    if partner is not None and nodes.size == 0:
        mapped = first_order_map(partner, u)
        second_regular = crossing_nodes(mapped.values, floor=GUARD_THRESHOLD).size == 0
    intermediate = first_order_potential(V0, u)
    vals = intermediate.values[np.isfinite(intermediate.values)]
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    real = bool(vals.size == 0 or np.max(np.abs(vals.imag)) <= 1e-10 * (1 + scale))
    return ChainStep(
        order=order,
        alpha=complex(u.energy),
        intermediate_regular=nodes.size == 0,
        dirichlet_kept=_keeps_dirichlet(u, problem),
        intermediate_real=real,
        second_regular=second_regular,
        singular_x=tuple(float(x) for x in u.x[nodes]),
    )


def chain_split(V0: GridFunction, spec: TransformationSpec, problem: BoundaryProblem) -> ChainSplit:
    """Build each first-order ordering of the chain and report its intermediate"""
    if spec.is_confluent:
        steps = [_step(V0, spec.u, None, "u", problem)]
    else:
        steps = [
            _step(V0, spec.u1, spec.u2, "u1_first", problem),
            _step(V0, spec.u2, spec.u1, "u2_first", problem),
        ]
    split = ChainSplit(steps)
    logger.info("chain_split_checked", splits=split.splits, orders=[s.order for s in steps])
    return split
