"""Reference control nets: an elliptic paraboloid, a sphere and a
hyperbolic paraboloid, all with small exact coordinates."""

from __future__ import annotations

from .patch import ControlNet

_NETS = {
    "paraboloid": (
        [(0, 0, 0), (1, 0, 1), (2, 0, 0), (0, 1, 1), (1, 1, 1), (0, 2, 0)],
        [1, 1, 1, 1, 1, 1],
    ),
    "sphere": (
        [(0, 0, 1), (1, 0, 1), (1, 0, 0), (0, 1, 1), (1, 1, 1), (0, 1, 0)],
        [1, 1, 2, 1, 1, 2],
    ),
    "saddle": (
        [(0, 0, 0), (1, 0, 0), (2, 0, 2), (0, 0.5, 0), (1, 0.5, 0), (0, 1, -0.5)],
        [1, 1, 1, 1, 1, 1],
    ),
}

NAMES = tuple(_NETS)


def example_net(name: str) -> ControlNet:
    """Control net by name: ``paraboloid``, ``sphere`` or ``saddle``."""
    points, weights = _NETS[name]
    return ControlNet.from_lists(points, weights)


def example1() -> ControlNet:
    return example_net("paraboloid")


def example2() -> ControlNet:
    return example_net("sphere")


def example3() -> ControlNet:
    return example_net("saddle")
