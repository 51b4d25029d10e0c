"""Numerical toolkit for Orlicz growth conditions and local boundedness."""
from .young import (
    HORIZON,
    DominationCertificate,
    UnboundedInverseError,
    YoungFunction,
    YoungFunctionError,
    check_dominates,
    conjugate,
    delta2_index,
    exp_poly,
    from_dict,
    inverse,
    linear_splice,
    parse_spec,
    phi_q,
    piecewise_table,
    power,
    power_log,
    scaled,
)

__version__ = "0.1.0"
