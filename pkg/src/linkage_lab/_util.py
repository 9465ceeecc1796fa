"""Small internal helpers."""

from __future__ import annotations

import sys


def ensure_recursion_capacity(frames: int) -> None:
    """Raise the interpreter recursion limit to accommodate a known search depth."""
    needed = frames + 1000
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)
