"""Priors, source sets, mechanisms and the Hamming product-space geometry.

Points of the product space ``{0, ..., m-1}^n`` are indexed by integers in
``range(m**n)`` with coordinate 0 as the least significant base-``m`` digit.
Every object here is immutable once built.
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

DEFAULT_CAP = 65536
PROB_TOL = 1e-12
_INPUT_TOL = 1e-6
_BLOCK = 1024


class SizingError(ValueError):
    """Raised when a product space exceeds the enumeration cap."""


def enumeration_cap() -> int:
    """Current enumeration cap, honouring the ``PUTLAB_CAP`` variable."""
    raw = os.environ.get("PUTLAB_CAP")
    if raw is None or raw == "":
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"PUTLAB_CAP must be an integer, got {raw!r}") from exc
    if cap < 2:
        raise ValueError("PUTLAB_CAP must be at least 2")
    return cap


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ProductSpace:
    """The Hamming space ``{1..m}^n``."""

    m: int
    n: int = 1

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"alphabet size m must be an integer >= 2, got {self.m}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"number of coordinates n must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        cap = enumeration_cap()
        if self.m ** self.n > cap:
            raise SizingError(f"m^n = {self.m}^{self.n} exceeds the enumeration cap {cap}")

    @property
    def size(self) -> int:
        return self.m ** self.n

    @cached_property
    def digits(self) -> np.ndarray:
        """``(size, n)`` array of coordinates of every point."""
        idx = np.arange(self.size)
        d = np.empty((self.size, self.n), dtype=np.int64)
        for k in range(self.n):
            d[:, k] = (idx // self.m ** k) % self.m
        d.setflags(write=False)
        return d

    def hamming(self, x: int, y: int) -> int:
        return int(np.count_nonzero(self.digits[x] != self.digits[y]))

    def distances(self, rows=None) -> np.ndarray:
        """Hamming distances from the points ``rows`` (default all) to every point."""
        src = self.digits if rows is None else self.digits[rows]
        out = np.zeros((src.shape[0], self.size), dtype=np.int64)
        for k in range(self.n):
            out += src[:, k, None] != self.digits[None, :, k]
        return out

    def neighbor_count(self, l: int) -> int:
        """Number of points at Hamming distance exactly ``l`` from any point."""
        if l < 0 or l > self.n:
            return 0
        return math.comb(self.n, l) * (self.m - 1) ** l

    def shift_index(self, coord: int, shift: int) -> np.ndarray:
        """Index map ``x -> x`` with coordinate ``coord`` moved by ``shift`` (mod m)."""
        d = self.digits[:, coord]
        step = self.m ** coord
        return np.arange(self.size) + (((d + shift) % self.m) - d) * step

    def neighbor_maps(self):
        """Yield index maps covering every ordered neighbour pair exactly once."""
        for k in range(self.n):
            for s in range(1, self.m):
                yield self.shift_index(k, s)


class ContractError(ValueError):
    """Raised when objects are combined across incompatible spaces."""


def _check_probability_vector(p: np.ndarray, what: str) -> np.ndarray:
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{what} must be a non-empty vector")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{what} has non-finite entries")
    if np.any(p <= 0):
        raise ValueError(f"{what} must have full support (all entries > 0)")
    # A correctly rounded sum leaves decimal inputs such as (0.4, 0.3, 0.2, 0.1) untouched.
    total = math.fsum(p)
    if abs(total - 1.0) > _INPUT_TOL:
        raise ValueError(f"{what} sums to {total}, not 1")
    return p / total if total != 1.0 else p.copy()


@dataclass(frozen=True, eq=False)
class Prior:
    """A full-support distribution over the points of a product space."""

    space: ProductSpace
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).ravel()
        if p.size != self.space.size:
            raise ContractError(f"prior has {p.size} entries, space has {self.space.size} points")
        object.__setattr__(self, "probs", _frozen(_check_probability_vector(p, "prior")))

    @classmethod
    def of(cls, probs: Sequence[float], n: int = 1) -> "Prior":
        """Build a prior from a probability vector; ``m`` is inferred from its length."""
        p = np.asarray(probs, dtype=float).ravel()
        m = round(p.size ** (1.0 / n))
        if m ** n != p.size:
            raise ContractError(f"length {p.size} is not a perfect {n}-th power")
        return cls(ProductSpace(m, n), p)

    @classmethod
    def uniform(cls, space: ProductSpace) -> "Prior":
        return cls(space, np.full(space.size, 1.0 / space.size))

    @classmethod
    def product(cls, base: "Prior", n: int) -> "Prior":
        """The i.i.d. product of a single-coordinate prior."""
        if base.space.n != 1:
            raise ContractError("product priors are built from single-coordinate priors")
        p = np.ones(1)
        for _ in range(n):
            p = np.kron(p, base.probs)
        return cls(ProductSpace(base.space.m, n), p)

    @property
    def m(self) -> int:
        return self.space.m

    def is_uniform(self, tol: float = PROB_TOL) -> bool:
        return bool(np.all(np.abs(self.probs - 1.0 / self.space.size) <= tol))

    def is_sorted(self) -> bool:
        return bool(np.all(np.diff(self.probs) <= 0.0))

    def __eq__(self, other):
        if not isinstance(other, Prior):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.space, self.probs.tobytes()))

    def __repr__(self):
        return f"Prior(m={self.space.m}, n={self.space.n}, probs={self.probs.tolist()})"

    def to_json(self) -> dict:
        return {"m": self.space.m, "n": self.space.n, "probs": self.probs.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "Prior":
        try:
            space = ProductSpace(int(doc["m"]), int(doc["n"]))
            return cls(space, np.asarray(doc["probs"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed prior document: {exc}") from exc


def sort_with_permutation(probs: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Sort a probability vector non-increasingly.

    Returns ``(sorted_probs, perm)`` with ``sorted_probs = probs[perm]``.  The
    sort is stable so tied symbols keep their relative order.
    """
    p = np.asarray(probs, dtype=float).ravel()
    perm = np.argsort(-p, kind="stable")
    return p[perm], perm


@dataclass(frozen=True, eq=False)
class Mechanism:
    """A row-stochastic channel from the points of ``space`` to ``size_out`` outputs."""

    space: ProductSpace
    rows: np.ndarray

    def __post_init__(self):
        Q = np.array(self.rows, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != self.space.size or Q.shape[1] < 1:
            raise ContractError(
                f"mechanism needs {self.space.size} rows and at least one column, got shape {Q.shape}")
        if not np.all(np.isfinite(Q)):
            raise ValueError("mechanism has non-finite entries")
        if np.any(Q < -PROB_TOL):
            raise ValueError("mechanism has negative entries")
        Q = np.clip(Q, 0.0, None)
        sums = Q.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > _INPUT_TOL):
            raise ValueError("mechanism rows must sum to 1")
        # Rows already stochastic up to rounding are kept as given.
        sums[np.abs(sums - 1.0) <= 1e-14] = 1.0
        object.__setattr__(self, "rows", _frozen(Q / sums[:, None]))

    @classmethod
    def of(cls, rows, n: int = 1) -> "Mechanism":
        Q = np.asarray(rows, dtype=float)
        m = round(Q.shape[0] ** (1.0 / n))
        if m ** n != Q.shape[0]:
            raise ContractError(f"{Q.shape[0]} rows is not a perfect {n}-th power")
        return cls(ProductSpace(m, n), Q)

    @property
    def size_out(self) -> int:
        return self.rows.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Mechanism):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash((self.space, self.rows.tobytes()))

    def __repr__(self):
        return f"Mechanism(m={self.space.m}, n={self.space.n}, size_out={self.size_out})"

    def to_json(self) -> dict:
        return {"m": self.space.m, "n": self.space.n, "rows": self.rows.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "Mechanism":
        try:
            space = ProductSpace(int(doc["m"]), int(doc["n"]))
            return cls(space, np.asarray(doc["rows"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed mechanism document: {exc}") from exc


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj.to_json(), indent=None, separators=(",", ":")) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


class SourceClass(enum.Enum):
    CLASS_I = "I"
    CLASS_II = "II"
    CLASS_III = "III"


class SourceKind(enum.Enum):
    SINGLETON = "singleton"
    FULL_SIMPLEX = "full_simplex"
    FAMILY = "family"


@dataclass(frozen=True, eq=False)
class SourceSet:
    """The set of priors an adversary considers possible.

    Finite families stand for their convex hull; every quantity derived here
    (class, ``theta_star``, validity) is a property of that hull.
    """

    space: ProductSpace
    kind: SourceKind
    members: tuple[Prior, ...] = field(default=())

    def __post_init__(self):
        if self.kind is SourceKind.FULL_SIMPLEX:
            if self.members:
                raise ValueError("the full simplex carries no explicit members")
            return
        if not self.members:
            raise ValueError("a source set needs at least one prior")
        if self.kind is SourceKind.SINGLETON and len(self.members) != 1:
            raise ValueError("a singleton source set has exactly one prior")
        for P in self.members:
            if P.space != self.space:
                raise ContractError("all priors of a source set must live on the same space")

    @classmethod
    def singleton(cls, prior: Prior) -> "SourceSet":
        return cls(prior.space, SourceKind.SINGLETON, (prior,))

    @classmethod
    def full_simplex(cls, space: ProductSpace) -> "SourceSet":
        return cls(space, SourceKind.FULL_SIMPLEX)

    @classmethod
    def family(cls, priors: Sequence[Prior]) -> "SourceSet":
        priors = tuple(priors)
        if not priors:
            raise ValueError("a source set needs at least one prior")
        return cls(priors[0].space, SourceKind.FAMILY, priors)

    @property
    def m(self) -> int:
        return self.space.m

    def member_matrix(self) -> np.ndarray:
        """Members stacked as rows; the simplex contributes its vertices."""
        if self.kind is SourceKind.FULL_SIMPLEX:
            return np.eye(self.space.size)
        return np.vstack([P.probs for P in self.members])

    @cached_property
    def source_class(self) -> SourceClass:
        if self.kind is SourceKind.FULL_SIMPLEX:
            return SourceClass.CLASS_I
        if self._contains_uniform():
            return SourceClass.CLASS_I
        if self.common_ordering() is not None:
            return SourceClass.CLASS_II
        return SourceClass.CLASS_III

    def _contains_uniform(self) -> bool:
        if len(self.members) == 1:
            return self.members[0].is_uniform()
        from putlab.lp import solve_lp

        V = self.member_matrix()
        k, size = V.shape
        u = np.full(size, 1.0 / size)
        # Minimise the total violation of  V^T lambda = u  over the simplex.
        A_eq = np.hstack([V.T, np.eye(size), -np.eye(size)])
        A_eq = np.vstack([A_eq, np.concatenate([np.ones(k), np.zeros(2 * size)])])
        b_eq = np.append(u, 1.0)
        c = np.concatenate([np.zeros(k), np.ones(2 * size)])
        res = solve_lp(c, A_eq=A_eq, b_eq=b_eq)
        return res.success and res.fun <= 1e-9

    def common_ordering(self) -> np.ndarray | None:
        """A permutation sorting every member non-increasingly, or ``None``."""
        if self.kind is SourceKind.FULL_SIMPLEX:
            return None
        V = self.member_matrix()
        diff = V[:, :, None] - V[:, None, :]
        if np.any((diff > 0).any(axis=0) & (diff < 0).any(axis=0)):
            return None
        return np.argsort(-V.sum(axis=0), kind="stable")

    @cached_property
    def _theta(self) -> tuple[float, float]:
        size = self.space.size
        if self.kind is SourceKind.FULL_SIMPLEX:
            return 1.0, 1.0 / size
        if len(self.members) == 1:
            p = self.members[0].probs
            return float(size * p.min()), float(p.max())
        from putlab.lp import solve_lp

        V = self.member_matrix()
        k = V.shape[0]
        # maximise t subject to  (V^T lambda)_x >= t,  sum lambda = 1.
        c = np.concatenate([np.zeros(k), [-1.0]])
        A_ub = np.hstack([-V.T, np.ones((size, 1))])
        A_eq = np.concatenate([np.ones(k), [0.0]])[None, :]
        res = solve_lp(c, A_ub, np.zeros(size), A_eq, [1.0])
        if not res.success:
            raise RuntimeError(f"max-min prior program failed: {res.status}")
        mix = res.x[:k] @ V
        t = min(float(-res.fun), float(mix.min()))
        return min(1.0, size * t), float(mix.max())

    @property
    def theta_star(self) -> float:
        """``m^n`` times the largest minimum probability over the hull."""
        return self._theta[0]

    @property
    def eta(self) -> float:
        """Largest probability of the prior attaining :attr:`theta_star`."""
        return self._theta[1]

    @property
    def min_probability(self) -> float:
        """Smallest probability over the hull (0 for the full simplex)."""
        if self.kind is SourceKind.FULL_SIMPLEX:
            return 0.0
        return float(self.member_matrix().min())


def classify_source_set(S: SourceSet) -> SourceClass:
    return S.source_class


def theta_star(S: SourceSet, space: ProductSpace | None = None) -> tuple[float, float]:
    """Return ``(theta_star, eta)`` for a source set."""
    if space is not None and space != S.space:
        raise ContractError("source set is defined over a different space")
    return S.theta_star, S.eta


def _require_square(Q: Mechanism):
    if Q.size_out != Q.space.size:
        raise ContractError("distortion needs the output alphabet to equal the input space")


def row_distortions(Q: Mechanism) -> np.ndarray:
    """Expected Hamming distortion of ``Q`` for each fixed input point."""
    _require_square(Q)
    size = Q.space.size
    out = np.empty(size)
    for lo in range(0, size, _BLOCK):
        hi = min(size, lo + _BLOCK)
        d = Q.space.distances(np.arange(lo, hi))
        out[lo:hi] = np.einsum("ij,ij->i", Q.rows[lo:hi], d)
    return out


def expected_distortion(Q: Mechanism, P: Prior) -> float:
    """``E[d(X, Y)]`` when ``X ~ P`` and ``Y ~ Q(.|X)``."""
    if P.space != Q.space:
        raise ContractError("prior and mechanism live on different spaces")
    return float(P.probs @ row_distortions(Q))


def is_valid(Q: Mechanism, S: SourceSet, D: float) -> bool:
    """Whether ``Q`` meets distortion ``D`` for every prior in the hull of ``S``."""
    if D < 0:
        raise ValueError("distortion level must be non-negative")
    if S.space != Q.space:
        raise ContractError("source set and mechanism live on different spaces")
    per_row = row_distortions(Q)
    if S.kind is SourceKind.FULL_SIMPLEX:
        worst = per_row.max()
    else:
        worst = max(float(P.probs @ per_row) for P in S.members)
    return bool(worst <= D + PROB_TOL)


class NotionKind(enum.Enum):
    DP = "dp"
    APPROX_DP = "adp"
    MAX_INFO = "maxinfo"
    MAX_LEAKAGE = "ml"
    RENYI_DP = "rdp"
    SIBSON = "sibson"
    MUTUAL_INFO = "mi"


_PRIOR_REQUIRED = {NotionKind.MAX_INFO, NotionKind.SIBSON, NotionKind.MUTUAL_INFO}


def _fmt_param(x: float) -> str:
    return f"{x:g}"


@dataclass(frozen=True)
class PrivacyNotion:
    """One of the seven privacy notions, with its ``delta`` or ``alpha`` parameter."""

    kind: NotionKind
    param: float | None = None

    def __post_init__(self):
        if self.kind is NotionKind.APPROX_DP:
            if self.param is None or not 0.0 < self.param < 1.0:
                raise ValueError(f"approximate DP needs delta in (0, 1), got {self.param}")
        elif self.kind in (NotionKind.RENYI_DP, NotionKind.SIBSON):
            if self.param is None or not self.param > 1.0 or not math.isfinite(self.param):
                raise ValueError(f"{self.kind.value} needs a finite alpha > 1, got {self.param}")
        elif self.param is not None:
            raise ValueError(f"{self.kind.value} takes no parameter")
        if self.param is not None:
            object.__setattr__(self, "param", float(self.param))

    @classmethod
    def dp(cls):
        return cls(NotionKind.DP)

    @classmethod
    def approx_dp(cls, delta: float):
        return cls(NotionKind.APPROX_DP, delta)

    @classmethod
    def max_info(cls):
        return cls(NotionKind.MAX_INFO)

    @classmethod
    def max_leakage(cls):
        return cls(NotionKind.MAX_LEAKAGE)

    @classmethod
    def renyi(cls, alpha: float):
        return cls(NotionKind.RENYI_DP, alpha)

    @classmethod
    def sibson(cls, alpha: float):
        return cls(NotionKind.SIBSON, alpha)

    @classmethod
    def mutual_info(cls):
        return cls(NotionKind.MUTUAL_INFO)

    @property
    def prior_required(self) -> bool:
        return self.kind in _PRIOR_REQUIRED

    @property
    def delta(self) -> float:
        if self.kind is not NotionKind.APPROX_DP:
            raise AttributeError("only approximate DP carries delta")
        return self.param

    @property
    def alpha(self) -> float:
        if self.kind not in (NotionKind.RENYI_DP, NotionKind.SIBSON):
            raise AttributeError("only Renyi DP and Sibson MI carry alpha")
        return self.param

    @property
    def label(self) -> str:
        if self.param is None:
            return self.kind.value
        return f"{self.kind.value}({_fmt_param(self.param)})"

    def __str__(self):
        return self.label
