"""
Numeric defaults, overridable from the environment or a .env file.
"""
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Load environment variables
load_dotenv()


class NumericSettings(BaseModel):
    """Defaults used whenever a run configuration leaves a value out"""

    grid_n: int = Field(2049, ge=3)
    eig_n: int = Field(2000, ge=16)
    levels: int = Field(6, ge=1)
    trunc_L: float = Field(15.0, gt=0)
    tol: float = Field(1e-3, gt=0)
    magnitude_cap: float = Field(1e150, gt=0)
    regularity_tol: float = Field(1e-8, gt=0)
    closed_form_endpoint_tol: float = Field(1e-9, gt=0)
    integrated_endpoint_tol: float = Field(1e-6, gt=0)
    seed_level_tol: float = Field(1e-6, gt=0)


def _env(name: str, default):
    value = os.getenv(name)
    return default if value in (None, "") else value


@lru_cache(maxsize=1)
def get_settings() -> NumericSettings:
    """Build the settings once per process from SUSY_* variables"""
    return NumericSettings(
        grid_n=_env("SUSY_GRID_N", 2049),
        eig_n=_env("SUSY_EIG_N", 2000),
        levels=_env("SUSY_LEVELS", 6),
        trunc_L=_env("SUSY_TRUNC_L", 15.0),
        tol=_env("SUSY_TOL", 1e-3),
        magnitude_cap=_env("SUSY_MAGNITUDE_CAP", 1e150),
        regularity_tol=_env("SUSY_REGULARITY_TOL", 1e-8),
    )
