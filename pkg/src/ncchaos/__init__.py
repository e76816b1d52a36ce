"""Exact free-probability workbench for Chebyshev sums of free variables."""

__version__ = "0.1.0"

from .errors import DomainError, NCChaosError, ResourceLimitError, ValidationError, limits
from .ncpart import SetPartition, NCPartition, catalan, enumerate_nc, enumerate_nc2, is_noncrossing
from .freedist import FreeLaw, free_poisson_centered, semicircular, bernoulli_sym, mesokurtic
from .chebyshev import Polynomial, cheb_u, pushforward_moment
from .kernels import ChebyshevSumSpec, Kernel, LiftedKernel, family
from .freemoments import Letter, VariableFamily, Word, sum_joint_moment, word_moment

__all__ = [
    "DomainError", "NCChaosError", "ResourceLimitError", "ValidationError", "limits",
    "SetPartition", "NCPartition", "catalan", "enumerate_nc", "enumerate_nc2", "is_noncrossing",
    "FreeLaw", "free_poisson_centered", "semicircular", "bernoulli_sym", "mesokurtic",
    "Polynomial", "cheb_u", "pushforward_moment",
    "ChebyshevSumSpec", "Kernel", "LiftedKernel", "family",
    "Letter", "VariableFamily", "Word", "sum_joint_moment", "word_moment",
]
