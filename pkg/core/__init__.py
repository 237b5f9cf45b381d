from .grid import (
    BoundaryProblem,
    Energy,
    Grid,
    GridFunction,
    PotentialClass,
    ProblemKind,
    crossing_nodes,
    harmonic_potential,
    same_grid,
    scattering_moment,
    zero_potential,
)
from .closed_forms import ClosedForm, ClosedFormKind, make_closed_form
from .integrator import schrodinger_residual, solve_ivp
from .signature import Asymptotic, Signature, boundary_signature
