import math
from typing import Self

from pydantic import Field, model_validator

from bobtaillab.core import settings
from bobtaillab.helpers.pydantic import FrozenModel


class MiningParams(FrozenModel):
    """Symbol table of the mining process.

    ``S`` is the hash-space size, ``h`` the hashes performed per interval,
    ``r`` the expected number of below-``v`` hashes per interval and ``v`` the
    expected minimum hash of one interval; they satisfy ``v = r S / h``.
    Integer ``S`` and ``t_k`` are kept exact so consensus code can compare
    256-bit values without rounding.
    """

    k: int = Field(ge=1)
    S: int | float = Field(gt=0)
    h: int = Field(ge=1)
    r: float = Field(gt=0.0)
    v: float = Field(gt=0.0)
    t_k: int | float = Field(gt=0)

    @model_validator(mode="after")
    def check_invariants(self) -> Self:
        if not math.isclose(self.v, self.r * self.S / self.h, rel_tol=1e-9):
            raise ValueError(f"v must equal r*S/h, got v={self.v}, r*S/h={self.r * self.S / self.h}")
        if not self.t_k < self.S:
            raise ValueError(f"target must lie below the hash-space size, got t_k={self.t_k}, S={self.S}")
        if self.h < self.k:
            raise ValueError(f"at least k hashes per interval are required, got h={self.h}, k={self.k}")
        return self

    @classmethod
    def build(
        cls,
        k: int,
        *,
        h: int = 1_000_000,
        r: float = 1.0,
        S: int | float | None = None,
        t_k: int | float | None = None,
    ) -> Self:
        """Derive ``v`` from ``(r, S, h)`` and, unless given, ``t_k = (k+1)/2 v``"""
        if S is None:
            S = settings.sim_hash_space
        v = r * S / h
        if t_k is None:
            t_k = (k + 1) / 2 * v
        return cls(k=k, S=S, h=h, r=r, v=v, t_k=t_k)

    @classmethod
    def unit(cls, k: int, *, r: float = 1.0) -> Self:
        """Normalized parameters with v = 1, for Monte Carlo work"""
        return cls.build(k, h=1_000_000, r=r, S=1_000_000 / r)

    def with_k(self, k: int) -> Self:
        """Same hash process, target re-derived for another k"""
        return type(self).build(k, h=self.h, r=self.r, S=self.S)
