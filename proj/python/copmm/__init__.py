"""Coded private matrix multiplication over prime fields.

Thin wrapper around the compiled extension; see the project README for the
full command-line interface and file formats.
"""

from copmm._core import (
    BelowThresholdError,
    BilinearTensor,
    DegreeAssignment,
    ValidationError,
    fpmm_run,
    is_prime,
    kronecker_compose,
    load_tensor_file,
    mat_mul,
    naive_tensor,
    preset_assignment,
    privacy_audit,
    psmm_run,
    recovery_threshold,
    security_audit,
    smm_run,
    strassen_tensor,
    verify_c1,
    verify_c2,
    verify_tensor,
)

__version__ = getattr(__import__("copmm._core", fromlist=["__version__"]), "__version__", "dev")

__all__ = [
    "BelowThresholdError",
    "BilinearTensor",
    "DegreeAssignment",
    "ValidationError",
    "fpmm_run",
    "is_prime",
    "kronecker_compose",
    "load_tensor_file",
    "mat_mul",
    "naive_tensor",
    "preset_assignment",
    "privacy_audit",
    "psmm_run",
    "recovery_threshold",
    "security_audit",
    "smm_run",
    "strassen_tensor",
    "verify_c1",
    "verify_c2",
    "verify_tensor",
]
