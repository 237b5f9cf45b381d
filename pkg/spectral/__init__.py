from .operator import TridiagonalOperator, discretize, resample
from .qr import characteristic_roots, eig_complex_tridiagonal, sort_spectrum
from .shooting import RefinedLevel, refine_eigenvalue, shoot_mismatch
from .report import ComputedSpectrum, MatchedPair, SpectrumReport, compare_spectra, compute_spectrum
from .checks import LevelStability, TailFit, intertwining_residual, l2_tail_check, seed_levels, stable_levels
