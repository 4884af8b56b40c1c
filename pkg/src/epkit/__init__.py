"""Spectral analysis of 2x2 complex symmetric Hamiltonians near exceptional points."""

from .errors import EPKitError, NumericalError, ValidationError
from .jordan import build_jordan_frame, build_root_chain, detect_ep
from .model import Hamiltonian2, build_hamiltonian, eigen_decompose, normalize_diagonal_chart, track_branch
from .phase import LoopPath, integrate_loop_phase, numeric_transport, transport_matrix
from .projective import ProjectivePoint, conic_residual, embed, select_chart
from .ptsym import build_c_operator, build_pt, pt_spectrum
from .puiseux import expand_eigenvalues, verify_convergence_order
from .rigidity import phase_rigidity, scan_landscape

__version__ = "0.1.0"

__all__ = [
    "EPKitError",
    "NumericalError",
    "ValidationError",
    "Hamiltonian2",
    "build_hamiltonian",
    "eigen_decompose",
    "normalize_diagonal_chart",
    "track_branch",
    "detect_ep",
    "build_root_chain",
    "build_jordan_frame",
    "expand_eigenvalues",
    "verify_convergence_order",
    "LoopPath",
    "integrate_loop_phase",
    "transport_matrix",
    "numeric_transport",
    "ProjectivePoint",
    "embed",
    "select_chart",
    "conic_residual",
    "phase_rigidity",
    "scan_landscape",
    "build_pt",
    "pt_spectrum",
    "build_c_operator",
]
