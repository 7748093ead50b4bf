"""Labeled tensor-product spaces and dense operator assembly.

Factor order is NV centers first, phonon Fock space last. Basis states are
addressed by per-center level labels plus a Fock occupation, so population
extraction and initial-state construction never juggle raw indices.

Time-dependent operators are stored as a static part plus (matrix, frequency)
terms; H(t) = static + sum_j [M_j e^{i w_j t} + M_j^dag e^{-i w_j t}].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidQuantumNumber

TWO_LEVEL_LABELS = ("g+1", "g-1")
THREE_LEVEL_LABELS = ("e", "g+1", "g-1")
TRIPLET_LABELS = ("g+1", "g0", "g-1")


@dataclass(frozen=True)
class SpaceDescriptor:
    """Factor dimensions and per-factor basis labels of a product space."""
    dims: tuple[int, ...]
    labels: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.dims) != len(self.labels):
            raise InvalidQuantumNumber("one label tuple per factor required")
        for d, lab in zip(self.dims, self.labels):
            if d != len(lab):
                raise InvalidQuantumNumber(
                    f"factor dim {d} does not match {len(lab)} labels")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))


@dataclass(frozen=True)
class HilbertSpace:
    """NV centers (2 or 3 levels each) tensor a truncated phonon mode."""
    nv_levels: int = 3
    n_centers: int = 1
    fock_dim: int = 16
    nv_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.nv_levels not in (2, 3):
            raise InvalidQuantumNumber("nv_levels must be 2 or 3")
        if self.n_centers not in (1, 2):
            raise InvalidQuantumNumber("n_centers must be 1 or 2")
        if self.fock_dim < 4:
            raise InvalidQuantumNumber("fock_dim must be >= 4")
        if not self.nv_labels:
            default = TWO_LEVEL_LABELS if self.nv_levels == 2 else THREE_LEVEL_LABELS
            object.__setattr__(self, "nv_labels", default)
        if len(self.nv_labels) != self.nv_levels:
            raise InvalidQuantumNumber(
                f"{self.nv_levels} levels need {self.nv_levels} labels, "
                f"got {self.nv_labels!r}")

    # ---------------------------------------------------------- structure

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.nv_levels,) * self.n_centers + (self.fock_dim,)

    @property
    def dim(self) -> int:
        return self.nv_levels ** self.n_centers * self.fock_dim

    @property
    def n_max(self) -> int:
        return self.fock_dim - 1

    def descriptor(self) -> SpaceDescriptor:
        fock = tuple(str(n) for n in range(self.fock_dim))
        return SpaceDescriptor(self.dims, (self.nv_labels,) * self.n_centers + (fock,))

    def level_index(self, label: str) -> int:
        try:
            return self.nv_labels.index(label)
        except ValueError:
            raise InvalidQuantumNumber(
                f"unknown level {label!r}; space has {self.nv_labels}") from None

    def index(self, *levels: str, n: int = 0) -> int:
        """Flat index of |levels..., n>."""
        if len(levels) != self.n_centers:
            raise InvalidQuantumNumber(
                f"need {self.n_centers} level labels, got {len(levels)}")
        if not 0 <= n < self.fock_dim:
            raise InvalidQuantumNumber(f"Fock index {n} outside [0, {self.n_max}]")
        multi = tuple(self.level_index(s) for s in levels) + (n,)
        return int(np.ravel_multi_index(multi, self.dims))

    def ket(self, *levels: str, n: int = 0) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(*levels, n=n)] = 1.0
        return v

    def label_of(self, flat: int) -> tuple:
        multi = np.unravel_index(flat, self.dims)
        return tuple(self.nv_labels[i] for i in multi[:-1]) + (int(multi[-1]),)

    # ----------------------------------------------------- operator lifts

    def lift(self, factor_ops: dict[int, np.ndarray]) -> np.ndarray:
        """Tensor product with identities on unlisted factors.

        Keys: 0..n_centers-1 for NV factors, n_centers for the Fock factor.
        """
        out = np.array([[1.0 + 0j]])
        for pos, d in enumerate(self.dims):
            op = factor_ops.get(pos)
            out = np.kron(out, np.eye(d, dtype=complex) if op is None
                          else np.asarray(op, dtype=complex))
        return out

    def nv_operator(self, op: np.ndarray, center: int) -> np.ndarray:
        if not 0 <= center < self.n_centers:
            raise InvalidQuantumNumber(f"center {center} outside space")
        return self.lift({center: op})

    def fock_operator(self, op: np.ndarray) -> np.ndarray:
        return self.lift({self.n_centers: op})

    def destroy(self) -> np.ndarray:
        a = np.diag(np.sqrt(np.arange(1, self.fock_dim, dtype=float)), k=1)
        return self.fock_operator(a)

    def number(self) -> np.ndarray:
        return self.fock_operator(np.diag(np.arange(self.fock_dim, dtype=float)))

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def ket_bra(self, center: int, a: str, b: str) -> np.ndarray:
        """|a><b| on one center."""
        m = np.zeros((self.nv_levels, self.nv_levels), dtype=complex)
        m[self.level_index(a), self.level_index(b)] = 1.0
        return self.nv_operator(m, center)

    def projector(self, center: int, label: str) -> np.ndarray:
        return self.ket_bra(center, label, label)

    # Pauli operators on the {g+1, g-1} qubit submanifold; zero on any
    # third level (e or g0).
    def sigma_x(self, center: int) -> np.ndarray:
        return (self.ket_bra(center, "g+1", "g-1")
                + self.ket_bra(center, "g-1", "g+1"))

    def sigma_y(self, center: int) -> np.ndarray:
        return (-1j * self.ket_bra(center, "g+1", "g-1")
                + 1j * self.ket_bra(center, "g-1", "g+1"))

    def sigma_z(self, center: int) -> np.ndarray:
        return (self.projector(center, "g+1") - self.projector(center, "g-1"))

    def sigma_plus(self, center: int) -> np.ndarray:
        return self.ket_bra(center, "g+1", "g-1")

    def pm_identity(self, center: int) -> np.ndarray:
        return self.projector(center, "g+1") + self.projector(center, "g-1")

    def spin1_sx(self, center: int) -> np.ndarray:
        """S_x of the ground triplet; requires labels (g+1, g0, g-1)."""
        if self.nv_labels != TRIPLET_LABELS:
            raise InvalidQuantumNumber(
                f"spin-1 S_x needs the {TRIPLET_LABELS} basis, space has "
                f"{self.nv_labels}")
        sx = np.zeros((3, 3), dtype=complex)
        sx[0, 1] = sx[1, 0] = sx[1, 2] = sx[2, 1] = 1.0 / math.sqrt(2.0)
        return self.nv_operator(sx, center)


def two_level_space(n_centers: int = 1, fock_dim: int = 16) -> HilbertSpace:
    return HilbertSpace(2, n_centers, fock_dim)


def three_level_space(n_centers: int = 1, fock_dim: int = 16) -> HilbertSpace:
    return HilbertSpace(3, n_centers, fock_dim)


def triplet_space(n_centers: int = 2, fock_dim: int = 16) -> HilbertSpace:
    return HilbertSpace(3, n_centers, fock_dim, nv_labels=TRIPLET_LABELS)


class OperatorMatrix:
    """Dense operator with harmonic time dependence on a labeled space.

    H(t) = static + sum_j (M_j e^{i w_j t} + M_j^dag e^{-i w_j t}).

    Assembled Hamiltonians are Hermitian by construction at every t; the
    `hermiticity_defect` probe exists so tests can assert it. Jump operators
    reuse the container with hermitian=False, in which case the conjugate
    partner is not added: L(t) = static + sum_j M_j e^{i w_j t}.
    """

    def __init__(self, space: SpaceDescriptor, static: np.ndarray,
                 terms=(), *, hermitian: bool = True):
        dim = space.dim
        static = np.asarray(static, dtype=complex)
        if static.shape != (dim, dim):
            raise InvalidQuantumNumber(
                f"static shape {static.shape} does not match space dim {dim}")
        clean_terms = []
        for mat, freq in terms:
            mat = np.asarray(mat, dtype=complex)
            if mat.shape != (dim, dim):
                raise InvalidQuantumNumber(
                    f"term shape {mat.shape} does not match space dim {dim}")
            mat = mat.copy()
            mat.flags.writeable = False
            clean_terms.append((mat, float(freq)))
        static = static.copy()
        static.flags.writeable = False
        self.space = space
        self.static = static
        self.terms = tuple(clean_terms)
        self.hermitian = bool(hermitian)

    def at(self, t: float) -> np.ndarray:
        h = self.static.astype(complex, copy=True)
        for mat, freq in self.terms:
            phase = np.exp(1j * freq * t)
            h += mat * phase
            if self.hermitian:
                h += mat.conj().T * np.conj(phase)
        return h

    def hermiticity_defect(self, t: float = 0.0) -> float:
        h = self.at(t)
        norm = np.linalg.norm(h)
        if norm == 0.0:
            return 0.0
        return float(np.linalg.norm(h - h.conj().T) / norm)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.space != other.space:
            raise InvalidQuantumNumber("cannot add operators on different spaces")
        if self.hermitian != other.hermitian:
            raise InvalidQuantumNumber("cannot mix hermitian and jump forms")
        return OperatorMatrix(self.space, self.static + other.static,
                              self.terms + other.terms,
                              hermitian=self.hermitian)

    @property
    def is_static(self) -> bool:
        return not self.terms
