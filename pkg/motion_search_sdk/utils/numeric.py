"""
Small numeric helpers shared by the renderer and the verifiers.
"""
import math


def round_half_up(value: float) -> int:
    """Round to the nearest integer, ties away from zero for positive values"""
    return int(math.floor(value + 0.5))


def band(value: float, ok: float, zero: float) -> float:
    """
    Piecewise-linear score band

    Returns 1.0 when ``value <= ok``, 0.0 when ``value >= zero`` and falls
    linearly in between.
    """
    if value <= ok:
        return 1.0
    if value >= zero:
        return 0.0
    return (zero - value) / (zero - ok)


def clamp(value: float, low: float = 0.0, high: float = 1.0) -> float:
    return max(low, min(high, value))
