"""Verification of component-and-connector models against views."""

from .model import (
    AbstractConnector,
    CncModel,
    CncView,
    Connector,
    Direction,
    Port,
    ViewPort,
    least_common_parent,
    reachable_from,
    subs_transitive,
    validate_model,
    validate_view,
)
from .textual import ParseError, parse_model, parse_view, print_model, print_view
from .verify import VerificationResult, verify, verify_specification
from .witness import Witness, WitnessKind, witness_as_view

__all__ = [
    "AbstractConnector", "CncModel", "CncView", "Connector", "Direction", "Port",
    "ViewPort", "least_common_parent", "reachable_from", "subs_transitive",
    "validate_model", "validate_view", "ParseError", "parse_model", "parse_view",
    "print_model", "print_view", "VerificationResult", "verify", "verify_specification",
    "Witness", "WitnessKind", "witness_as_view",
]
