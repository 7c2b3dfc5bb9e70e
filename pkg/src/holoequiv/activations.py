"""Named activation library.

Every activation maps the real line into ``[0, 1]`` and carries an auditable
Lipschitz constant.  ``clip`` is the clipped identity, ``clipped_square`` its
square, and ``piecewise_linear`` interpolates explicit breakpoints and is
constant outside them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = ("clip", "clipped_square", "piecewise_linear")


@dataclass(frozen=True)
class Activation:
    kind: str = "clip"
    points: tuple[tuple[float, float], ...] = ()
    declared_lipschitz: float | None = None
    _slope: float = field(init=False, repr=False, compare=False, default=0.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown activation kind {self.kind!r}; expected one of {KINDS}")
        if self.kind != "piecewise_linear":
            if self.points:
                raise ValueError(f"{self.kind} takes no breakpoints")
            return
        pts = tuple((float(a), float(b)) for a, b in self.points)
        if not pts:
            raise ValueError("piecewise_linear needs at least one breakpoint")
        xs = [p[0] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must have strictly increasing abscissae")
        if any(not 0.0 <= p[1] <= 1.0 for p in pts):
            raise ValueError("breakpoint values must lie in [0, 1]")
        slope = max((abs(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(pts, pts[1:])),
                    default=0.0)
        if self.declared_lipschitz is not None and self.declared_lipschitz < slope - 1e-12:
            raise ValueError(
                f"declared Lipschitz constant {self.declared_lipschitz} is below the "
                f"actual slope {slope}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_slope", slope)

    @property
    def lipschitz(self) -> float:
        if self.kind == "clip":
            return 1.0
        if self.kind == "clipped_square":
            return 2.0
        if self.declared_lipschitz is not None:
            return float(self.declared_lipschitz)
        return self._slope

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "clip":
            return np.clip(t, 0.0, 1.0)
        if self.kind == "clipped_square":
            return np.clip(t, 0.0, 1.0) ** 2
        xs, ys = zip(*self.points)
        return np.interp(t, xs, ys)

    def to_dict(self) -> dict:
        if self.kind != "piecewise_linear":
            return {"kind": self.kind}
        return {"kind": self.kind, "points": [list(p) for p in self.points],
                "lip": self.lipschitz}

    @classmethod
    def from_dict(cls, data) -> "Activation":
        if isinstance(data, str):
            return cls(data)
        kind = data["kind"]
        if kind == "piecewise_linear":
            return cls(kind, tuple(map(tuple, data["points"])), data.get("lip"))
        return cls(kind)


CLIP = Activation("clip")
CLIPPED_SQUARE = Activation("clipped_square")


def affine_squash(slope: float, offset: float) -> Activation:
    """``t -> slope*t + offset`` on ``[0, 1]`` as a piecewise-linear activation."""
    return Activation("piecewise_linear", ((0.0, offset), (1.0, offset + slope)), abs(slope))
