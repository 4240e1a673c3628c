"""Seeded random layered diagrams for the backend cross-check harness."""

from __future__ import annotations

import numpy as np

from .ir import (
    BRAID_NEG,
    BRAID_POS,
    CAP,
    CHARGE,
    CUP,
    MULTICHARGE,
    Diagram,
    Generator,
)

__all__ = ["random_diagram"]


def random_diagram(
    d: int,
    rng: np.random.Generator,
    max_strings: int = 6,
    max_slices: int = 8,
    max_braids: int = 2,
) -> Diagram:
    """A valid diagram with bounded width, depth and braid count.

    Charges are drawn from [-d, 2d) to exercise unreduced values; braids are
    capped separately because each one multiplies the symbolic term count
    by d.
    """
    top = 2 * int(rng.integers(0, max_strings // 2 + 1))
    width = top
    n_slices = int(rng.integers(0, max_slices + 1))
    braids = 0
    slices: list[Generator] = []
    for _ in range(n_slices):
        kinds = []
        weights = []
        if width >= 1:
            kinds.append(CHARGE)
            weights.append(0.40)
        if width + 2 <= max_strings:
            kinds.append(CAP)
            weights.append(0.22)
        if width >= 2:
            kinds.append(CUP)
            weights.append(0.22)
            kinds.append(MULTICHARGE)
            weights.append(0.08)
            if braids < max_braids:
                kinds.append(BRAID_POS)
                weights.append(0.04)
                kinds.append(BRAID_NEG)
                weights.append(0.04)
        if not kinds:
            kinds, weights = [CAP], [1.0]
        w = np.array(weights) / sum(weights)
        kind = kinds[int(rng.choice(len(kinds), p=w))]
        if kind == CHARGE:
            slices.append(
                Generator(CHARGE, pos=int(rng.integers(1, width + 1)), k=int(rng.integers(-d, 2 * d)))
            )
        elif kind == CAP:
            slices.append(Generator(CAP, pos=int(rng.integers(1, width + 2))))
            width += 2
        elif kind == CUP:
            slices.append(Generator(CUP, pos=int(rng.integers(1, width))))
            width -= 2
        elif kind == MULTICHARGE:
            count = int(rng.integers(2, min(width, 3) + 1))
            positions = rng.choice(np.arange(1, width + 1), size=count, replace=False)
            items = tuple((int(p), int(rng.integers(-d, 2 * d))) for p in positions)
            slices.append(Generator(MULTICHARGE, items=items))
        else:
            slices.append(Generator(kind, pos=int(rng.integers(1, width))))
            braids += 1
    return Diagram(d, top, tuple(slices))
