"""The four classes of non-satisfaction reasons."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .model import AbstractConnector, Direction, ViewPort


class HierarchyKind(str, Enum):
    # independent in the view, one contains the other in the model
    CONTAINED_IN_MODEL_ONLY = "contained_in_model_only"
    # one contains the other in the view, independent in the model
    INDEPENDENT_IN_MODEL_ONLY = "independent_in_model_only"
    # related both ways round
    REVERSE_CONTAINMENT = "reverse_containment"


class PortFailure(str, Enum):
    NO_MATCHING_PORT = "no_matching_port"
    TYPE_MISMATCH = "type_mismatch"
    DIRECTION_MISMATCH = "direction_mismatch"


@dataclass(frozen=True)
class MissingComponent:
    cmp: str
    kind = "missing_component"


@dataclass(frozen=True)
class HierarchyMismatch:
    """``cmp`` is the containing side, ``sub_cmp`` the contained side.

    For ``CONTAINED_IN_MODEL_ONLY`` containment is read in the model, for
    the other two kinds it is read in the view.
    """

    mismatch: HierarchyKind
    cmp: str
    sub_cmp: str
    kind = "hierarchy_mismatch"


@dataclass(frozen=True)
class InterfaceMismatch:
    cmp: str
    view_port: ViewPort
    failure: PortFailure
    found_type: Optional[str] = None
    found_direction: Optional[Direction] = None
    kind = "interface_mismatch"


@dataclass(frozen=True)
class MissingConnection:
    abs_con: AbstractConnector
    kind = "missing_connection"


NonSatReason = Union[MissingComponent, HierarchyMismatch, InterfaceMismatch, MissingConnection]

REASON_KINDS = ("missing_component", "hierarchy_mismatch", "interface_mismatch",
                "missing_connection")
