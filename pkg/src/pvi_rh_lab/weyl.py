"""Parameter space, the affine Weyl group W(D4^(1)) and the kappa -> a -> theta maps."""

from __future__ import annotations

import cmath
import random
from dataclasses import InitVar, dataclass
from typing import Iterable, Sequence

from .scalars import GaussianRational, Scalar, exactify, format_scalar, is_exact, parse_scalar
from .scalars import random_rational

__all__ = [
    "CARTAN",
    "Kappa",
    "LocalTraces",
    "ThetaVec",
    "GroupWord",
    "reflect",
    "apply_word",
    "local_traces",
    "theta_from_traces",
    "theta_of_kappa",
    "fuchs_defect",
    "random_exact_kappa",
    "random_real_kappa",
]

# Cartan matrix of type D4^(1); node 0 is the central node.
CARTAN: tuple[tuple[int, ...], ...] = (
    (2, -1, -1, -1, -1),
    (-1, 2, 0, 0, 0),
    (-1, 0, 2, 0, 0),
    (-1, 0, 0, 2, 0),
    (-1, 0, 0, 0, 2),
)

APPROX_FUCHS_TOL = 1e-12


def fuchs_defect(k0, k1, k2, k3, k4):
    """2k0 + k1 + k2 + k3 + k4 - 1 (the eta of the coalescence identities)."""
    return 2 * k0 + k1 + k2 + k3 + k4 - 1


@dataclass(frozen=True)
class Kappa:
    """Local exponents (k0, ..., k4).

    By default the Fuchs relation 2k0 + k1 + k2 + k3 + k4 = 1 is enforced
    (exactly for exact scalars, to 1e-12 otherwise). ``Kappa.unchecked``
    builds a point off that hyperplane; it exists for the polynomial
    identities that are stated without the relation.
    """

    k0: Scalar
    k1: Scalar
    k2: Scalar
    k3: Scalar
    k4: Scalar
    strict: InitVar[bool] = True

    def __post_init__(self, strict):
        for name in ("k0", "k1", "k2", "k3", "k4"):
            object.__setattr__(self, name, exactify(getattr(self, name)))
        if not strict:
            return
        eta = fuchs_defect(*self)
        if is_exact(eta):
            if eta != 0:
                raise ValueError(f"Fuchs relation violated: 2k0+k1+k2+k3+k4-1 = {eta}")
        elif abs(eta) > APPROX_FUCHS_TOL:
            raise ValueError(f"Fuchs relation violated by {abs(eta):.3e}")

    @classmethod
    def unchecked(cls, k0, k1, k2, k3, k4) -> "Kappa":
        """UNCHECKED: no Fuchs relation. Only for off-locus identities."""
        return cls(k0, k1, k2, k3, k4, strict=False)

    @classmethod
    def from_k0123(cls, k0, k1, k2, k3) -> "Kappa":
        """Derive k4 from the Fuchs relation."""
        return cls(k0, k1, k2, k3, 1 - 2 * k0 - k1 - k2 - k3)

    @classmethod
    def from_k1234(cls, k1, k2, k3, k4) -> "Kappa":
        """Derive k0 from the Fuchs relation."""
        return cls(exactify(1 - k1 - k2 - k3 - k4) / 2, k1, k2, k3, k4)

    def __iter__(self):
        return iter((self.k0, self.k1, self.k2, self.k3, self.k4))

    def __getitem__(self, i: int) -> Scalar:
        return (self.k0, self.k1, self.k2, self.k3, self.k4)[i]

    def __len__(self):
        return 5

    @property
    def eta(self):
        return fuchs_defect(*self)

    @property
    def exact(self) -> bool:
        return all(is_exact(k) for k in self)

    def to_approx(self) -> "Kappa":
        return Kappa.unchecked(*(complex(k) for k in self))

    def to_json(self) -> dict:
        return {f"k{i}": format_scalar(k) for i, k in enumerate(self)}

    @classmethod
    def from_json(cls, doc: dict, field: str | None = None, strict: bool = True) -> "Kappa":
        vals = [parse_scalar(doc[f"k{i}"], field) for i in range(5)]
        return cls(*vals, strict=strict)


@dataclass(frozen=True)
class LocalTraces:
    a1: complex
    a2: complex
    a3: complex
    a4: complex

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3, self.a4))

    def __getitem__(self, i):
        """1-based, matching the singular point index."""
        return (self.a1, self.a2, self.a3, self.a4)[i - 1]


@dataclass(frozen=True)
class ThetaVec:
    th1: Scalar
    th2: Scalar
    th3: Scalar
    th4: Scalar

    def __iter__(self):
        return iter((self.th1, self.th2, self.th3, self.th4))

    def __getitem__(self, i):
        return (self.th1, self.th2, self.th3, self.th4)[i - 1]

    def to_json(self) -> dict:
        return {f"th{i + 1}": format_scalar(v) for i, v in enumerate(self)}


@dataclass(frozen=True)
class GroupWord:
    """A word in the generators, applied left to right."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        for x in self.letters:
            if not 0 <= x <= 4:
                raise IndexError(f"generator index {x} out of range 0..4")

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(int(tok) for tok in text.replace(",", " ").split()))


def _check_index(i: int) -> int:
    if not isinstance(i, int) or not 0 <= i <= 4:
        raise IndexError(f"generator index {i!r} out of range 0..4")
    return i


def reflect(kappa: Kappa, i: int) -> Kappa:
    """sigma_i: k_j -> k_j - k_i * c_ij."""
    _check_index(i)
    ki = kappa[i]
    row = CARTAN[i]
    return Kappa.unchecked(*(kappa[j] - ki * row[j] for j in range(5)))


def apply_word(kappa: Kappa, word: GroupWord | Iterable[int]) -> Kappa:
    if not isinstance(word, GroupWord):
        word = GroupWord(tuple(word))
    for letter in word:
        kappa = reflect(kappa, letter)
    return kappa


def local_traces(kappa: Kappa) -> LocalTraces:
    """a_i = 2 cos(pi k_i) for i = 1, 2, 3 and a_4 = -2 cos(pi k_4).

    Exact inputs are converted to complex here, cosine being transcendental.
    """
    k = [complex(x) for x in kappa]
    return LocalTraces(2 * cmath.cos(cmath.pi * k[1]), 2 * cmath.cos(cmath.pi * k[2]),
                       2 * cmath.cos(cmath.pi * k[3]), -2 * cmath.cos(cmath.pi * k[4]))


def theta_from_traces(a: LocalTraces | Sequence) -> ThetaVec:
    a1, a2, a3, a4 = a
    return ThetaVec(
        a1 * a4 + a2 * a3,
        a2 * a4 + a3 * a1,
        a3 * a4 + a1 * a2,
        a1 * a2 * a3 * a4 + a1 * a1 + a2 * a2 + a3 * a3 + a4 * a4 - 4,
    )


def theta_of_kappa(kappa: Kappa) -> ThetaVec:
    return theta_from_traces(local_traces(kappa))


def random_exact_kappa(rng: random.Random, bound: int = 1000) -> Kappa:
    """Gaussian-rational k0..k3, k4 from the Fuchs relation."""
    ks = [GaussianRational(random_rational(rng, bound), random_rational(rng, bound))
          for _ in range(4)]
    return Kappa.from_k0123(*ks)


def random_real_kappa(rng: random.Random, scale: float = 1.0) -> Kappa:
    ks = [complex(rng.uniform(-scale, scale)) for _ in range(4)]
    return Kappa.from_k0123(*ks)
