from .models import CaseLabel, SeedSpectrum, SpectrumPrediction, Verdict, ZeroReport
from .zeros import count_zeros
from .symmetry import is_even, is_pt_symmetric, parity_deviation, pt_check
from .cases import classify, is_complex_potential
