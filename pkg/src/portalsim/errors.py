"""Exception types shared across the simulator."""

from __future__ import annotations


class PortalSimError(Exception):
    """Base class for all simulator errors."""


class GenerationFailure(PortalSimError):
    """World generation could not satisfy placement constraints."""


class SlotOccupied(PortalSimError):
    """A cube was released onto a slot that is already filled."""


class CubeAlreadyPlaced(PortalSimError):
    """A placed cube was targeted by a grab or lock request."""


class LockDenied(PortalSimError):
    """An ownership request lost to an existing holder.

    Lock denial is an expected outcome and is normally reported as a
    value, not raised; the exception exists for callers that want
    acquire-or-raise semantics.
    """

    def __init__(self, object_id: int, owner: int):
        super().__init__(f"object {object_id} is locked by player {owner}")
        self.object_id = object_id
        self.owner = owner


class ObjectPlaced(PortalSimError):
    """Interaction targeted an object that has reached a terminal slot."""


class NotHolding(PortalSimError):
    """A release or transfer came from a player holding nothing."""


class OutOfBounds(PortalSimError):
    """A teleport or placement target lies outside the room interior."""


class NoWindow(PortalSimError):
    """A view-window operation ran under a variant with no window."""


class SelectionMismatch(PortalSimError):
    """A claimed ray target disagrees with the host's own ray cast.

    Raised while validating client inputs; the host logs the input as
    rejected rather than propagating the error.
    """


class MalformedLog(PortalSimError):
    """A session log failed structural validation."""
