"""Dense operator algebra on tensor-product spin/boson Hilbert spaces.

Conventions used throughout the package:

* tensor order is fixed as spin_1 (x) ... (x) spin_N (x) boson,
* single-site Pauli matrices carry eigenvalues +-1, collective spin
  operators are J_alpha = sum_j sigma_j^alpha / 2,
* the boson mode is truncated at ``fock_cutoff`` levels (occupations
  0 .. fock_cutoff-1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

DEFAULT_DIM_CEILING = 4096

HERMITICITY_TOL = 1e-12
STATE_NORM_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-10
DENSITY_EIG_TOL = -1e-8

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


class DimensionOverflowError(ValueError):
    """Requested tensor product exceeds the configured dimension ceiling."""


class SpaceMismatchError(ValueError):
    """Two objects live on incompatible Hilbert spaces."""


@dataclass(frozen=True)
class HilbertSpace:
    """Tensor-product space of ``spin_count`` qubits and one truncated boson.

    ``fock_cutoff=1`` describes a spin-only space (the boson factor is
    trivial); pure boson spaces use ``spin_count=0``.
    """

    spin_count: int
    fock_cutoff: int

    def __post_init__(self):
        if self.spin_count < 0:
            raise ValueError("spin_count must be >= 0")
        if self.fock_cutoff < 1:
            raise ValueError("fock_cutoff must be >= 1")

    @property
    def spin_dim(self) -> int:
        return 2 ** self.spin_count

    @property
    def total_dim(self) -> int:
        return self.spin_dim * self.fock_cutoff


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix tagged with its Hilbert-space factorization."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got {m.shape}")
        if m.shape[0] != self.space.total_dim:
            raise ValueError(
                f"matrix dim {m.shape[0]} != space dim {self.space.total_dim}")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def hermiticity_residual(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return self.hermiticity_residual() < tol

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, Operator):
            if other.space != self.space:
                raise SpaceMismatchError(
                    f"operator spaces differ: {self.space} vs {other.space}")
            return other.matrix
        return other

    def __add__(self, other):
        return Operator(self.space, self.matrix + self._coerce(other))

    def __sub__(self, other):
        return Operator(self.space, self.matrix - self._coerce(other))

    def __mul__(self, scalar):
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return Operator(self.space, -self.matrix)

    def __matmul__(self, other):
        return Operator(self.space, self.matrix @ self._coerce(other))

    def apply(self, state: "StateVector") -> np.ndarray:
        """Raw amplitudes of O|psi> (not normalized)."""
        if state.space != self.space:
            raise SpaceMismatchError("operator/state space mismatch")
        return self.matrix @ state.amplitudes


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state on a :class:`HilbertSpace`."""

    space: HilbertSpace
    amplitudes: np.ndarray
    normalize: bool = field(default=True, repr=False)

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel()
        if v.size != self.space.total_dim:
            raise ValueError(
                f"amplitude length {v.size} != space dim {self.space.total_dim}")
        nrm = np.linalg.norm(v)
        if self.normalize:
            if nrm == 0:
                raise ValueError("cannot normalize the zero vector")
            v = v / nrm
        elif abs(nrm - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"state norm deviates from 1 by {abs(nrm - 1.0):.2e}")
        object.__setattr__(self, "amplitudes", _freeze(v))

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def overlap(self, other: "StateVector") -> complex:
        if other.space != self.space:
            raise SpaceMismatchError("state spaces differ")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(
            self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, (numerically) positive density operator."""

    space: HilbertSpace
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.total_dim, self.space.total_dim):
            raise ValueError("density matrix shape does not match space")
        if self.validate:
            herm = np.abs(m - m.conj().T).max()
            if herm > 1e-10:
                raise ValueError(f"density matrix not Hermitian: residual {herm:.2e}")
            tr = m.trace()
            if abs(tr - 1.0) > DENSITY_TRACE_TOL:
                raise ValueError(f"density matrix trace {tr} != 1")
            lo = float(np.linalg.eigvalsh(m).min())
            if lo < DENSITY_EIG_TOL:
                raise ValueError(f"density matrix min eigenvalue {lo:.2e} < {DENSITY_EIG_TOL}")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def trace(self) -> complex:
        return complex(self.matrix.trace())

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


# ---------------------------------------------------------------------------
# basic constructors
# ---------------------------------------------------------------------------

def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.total_dim, dtype=complex))


def _spin_space(n: int) -> HilbertSpace:
    return HilbertSpace(spin_count=n, fock_cutoff=1)


def _boson_space(cutoff: int) -> HilbertSpace:
    return HilbertSpace(spin_count=0, fock_cutoff=cutoff)


def tensor(a, b, *, max_dim: int = DEFAULT_DIM_CEILING):
    """Kronecker product of two operators or two state vectors.

    Spin factors must precede the boson factor; a product that would put
    boson levels to the left of spins is rejected.
    """
    if type(a) is not type(b):
        raise TypeError("tensor operands must be of the same kind")
    if a.space.fock_cutoff > 1 and b.space.spin_count > 0:
        raise ValueError("tensor order is fixed: spins before the boson factor")
    dim = a.space.total_dim * b.space.total_dim
    if dim > max_dim:
        raise DimensionOverflowError(
            f"tensor product dim {dim} exceeds ceiling {max_dim}")
    space = HilbertSpace(a.space.spin_count + b.space.spin_count,
                         a.space.fock_cutoff * b.space.fock_cutoff)
    if isinstance(a, Operator):
        return Operator(space, np.kron(a.matrix, b.matrix))
    if isinstance(a, StateVector):
        return StateVector(space, np.kron(a.amplitudes, b.amplitudes),
                           normalize=False)
    raise TypeError(f"cannot tensor objects of type {type(a).__name__}")


def embed_site_operator(op2: np.ndarray, site: int, n_spins: int,
                        cutoff: int = 1) -> np.ndarray:
    """Single-qubit matrix acting on ``site`` inside the full product space."""
    left = np.eye(2 ** site, dtype=complex)
    right = np.eye(2 ** (n_spins - site - 1), dtype=complex)
    out = np.kron(np.kron(left, op2), right)
    if cutoff > 1:
        out = np.kron(out, np.eye(cutoff, dtype=complex))
    return out


def collective_spin(n_spins: int, axis: str, cutoff: int = 1) -> Operator:
    """Collective spin operator J_alpha = sum_j sigma_j^alpha / 2.

    ``axis`` is one of x, y, z, +, -; J_+- = J_x +- i J_y.  With
    ``cutoff > 1`` the operator is padded with an identity boson factor.
    """
    if n_spins < 1:
        raise ValueError("collective_spin requires n_spins >= 1")
    space = HilbertSpace(n_spins, cutoff)
    if axis in ("x", "y", "z"):
        sigma = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}[axis]
        total = np.zeros((space.total_dim, space.total_dim), dtype=complex)
        for j in range(n_spins):
            total += embed_site_operator(sigma / 2.0, j, n_spins, cutoff)
        return Operator(space, total)
    if axis == "+":
        return collective_spin(n_spins, "x", cutoff) + \
            1j * collective_spin(n_spins, "y", cutoff)
    if axis == "-":
        return collective_spin(n_spins, "x", cutoff) - \
            1j * collective_spin(n_spins, "y", cutoff)
    raise ValueError(f"unknown axis {axis!r}")


def spin_lowering(site: int, n_spins: int, cutoff: int = 1) -> Operator:
    """sigma_j^- on one site (the per-spin collapse operator)."""
    space = HilbertSpace(n_spins, cutoff)
    return Operator(space, embed_site_operator(SIGMA_MINUS, site, n_spins, cutoff))


def boson(cutoff: int, kind: str, n_spins: int = 0) -> Operator:
    """Truncated boson ladder operator: annihilate / create / number.

    With ``n_spins > 0`` the operator is padded with spin identities on
    the left (fixed tensor order).
    """
    if cutoff < 2:
        raise ValueError("bosonic operators need fock_cutoff >= 2")
    a = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)
    if kind == "annihilate":
        mat = a
    elif kind == "create":
        mat = a.conj().T
    elif kind == "number":
        mat = a.conj().T @ a
    else:
        raise ValueError(f"unknown boson operator kind {kind!r}")
    space = HilbertSpace(n_spins, cutoff)
    if n_spins > 0:
        mat = np.kron(np.eye(2 ** n_spins, dtype=complex), mat)
    return Operator(space, mat)


def squeeze_unitary(r: float, cutoff: int, n_spins: int = 0) -> Operator:
    """exp[r (m^2 - m'^2) / 2] on the truncated Fock space.

    The generator is anti-Hermitian, so the matrix exponential (evaluated
    through an eigendecomposition of the Hermitian i*generator) is unitary
    on the truncated space to machine precision.  Values |r| > 5 are
    rejected: the squeezed images of even low Fock states then spread far
    beyond any practical cutoff and the truncated operator no longer
    approximates the infinite-dimensional transform.
    """
    if abs(r) > 5.0:
        raise ValueError("|r| > 5 is truncation-unsafe for squeeze_unitary")
    a = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)
    gen = 0.5 * r * (a @ a - a.conj().T @ a.conj().T)
    herm = 1j * gen
    vals, vecs = eigh(herm)
    u = (vecs * np.exp(-1j * vals)) @ vecs.conj().T
    half = cutoff // 2
    residual = np.abs((u.conj().T @ u - np.eye(cutoff))[:half, :half]).max()
    if residual > 1e-6:
        raise RuntimeError(
            f"squeeze unitarity residual {residual:.2e} exceeds 1e-6")
    space = HilbertSpace(n_spins, cutoff)
    if n_spins > 0:
        u = np.kron(np.eye(2 ** n_spins, dtype=complex), u)
    return Operator(space, u)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def fock_state(cutoff: int, n: int) -> StateVector:
    if not 0 <= n < cutoff:
        raise ValueError(f"Fock level {n} outside cutoff {cutoff}")
    v = np.zeros(cutoff, dtype=complex)
    v[n] = 1.0
    return StateVector(_boson_space(cutoff), v, normalize=False)


def dicke_state(n_spins: int, axis: str, m: float) -> StateVector:
    """Symmetric Dicke state |N/2, m> along the z or x axis.

    The z-basis state is the normalized symmetric superposition of all
    product states with N/2 + m spins excited; the x-basis state is the
    per-qubit rotation of the z-basis one (|e> -> |+>, |g> -> |->).
    """
    twice_m = round(2 * m)
    if abs(twice_m - 2 * m) > 1e-12 or (n_spins + twice_m) % 2 != 0:
        raise ValueError(f"invalid (N={n_spins}, m={m}) pair")
    if abs(m) > n_spins / 2:
        raise ValueError(f"|m|={abs(m)} exceeds N/2={n_spins / 2}")
    n_exc = (n_spins + twice_m) // 2
    dim = 2 ** n_spins
    v = np.zeros(dim, dtype=complex)
    for idx in range(dim):
        # bit convention: bit j set <=> spin j in |e>; index 0 is |ee...e>
        excited = sum((idx >> (n_spins - 1 - j)) & 1 == 0 for j in range(n_spins))
        if excited == n_exc:
            v[idx] = 1.0
    state = StateVector(_spin_space(n_spins), v)
    if axis == "z":
        return state
    if axis == "x":
        hadamard = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2)
        rot = hadamard
        for _ in range(n_spins - 1):
            rot = np.kron(rot, hadamard)
        return StateVector(state.space, rot @ state.amplitudes, normalize=False)
    raise ValueError(f"dicke_state axis must be 'z' or 'x', got {axis!r}")


def basis_product_state(n_spins: int, pattern: str,
                        cutoff: int = 1, fock_level: int = 0) -> StateVector:
    """Product state from a pattern over {e, g, +, -}, optionally (x) |n>."""
    single = {
        "e": np.array([1.0, 0.0], dtype=complex),
        "g": np.array([0.0, 1.0], dtype=complex),
        "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2),
        "-": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2),
    }
    if len(pattern) != n_spins:
        raise ValueError("pattern length must equal n_spins")
    v = np.array([1.0], dtype=complex)
    for ch in pattern:
        v = np.kron(v, single[ch])
    if cutoff > 1:
        f = np.zeros(cutoff, dtype=complex)
        f[fock_level] = 1.0
        v = np.kron(v, f)
    return StateVector(HilbertSpace(n_spins, cutoff), v, normalize=False)


# ---------------------------------------------------------------------------
# measures and utilities
# ---------------------------------------------------------------------------

def fidelity(rho: DensityMatrix, psi: StateVector) -> float:
    """Pure-target fidelity <psi| rho |psi>."""
    if rho.space != psi.space:
        raise SpaceMismatchError("fidelity: density matrix and state spaces differ")
    val = complex(np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"fidelity has imaginary residual {val.imag:.2e}")
    return float(np.clip(val.real, 0.0, 1.0 + 1e-9))


def partial_trace_boson(rho: DensityMatrix) -> DensityMatrix:
    """Reduced spin state: trace out the boson factor."""
    ds, nb = rho.space.spin_dim, rho.space.fock_cutoff
    m = rho.matrix.reshape(ds, nb, ds, nb)
    red = np.einsum("ikjk->ij", m)
    return DensityMatrix(_spin_space(rho.space.spin_count), red, validate=False)


def boson_tail_population(rho: DensityMatrix, levels: int = 2) -> float:
    """Total population in the top ``levels`` Fock levels (truncation probe)."""
    ds, nb = rho.space.spin_dim, rho.space.fock_cutoff
    if nb < levels:
        return 0.0
    m = rho.matrix.reshape(ds, nb, ds, nb)
    pops = np.einsum("inin->n", m).real
    return float(pops[-levels:].sum())


def warn_if_truncation_unsafe(tail_population: float,
                              threshold: float = 1e-6) -> bool:
    """Flag (and warn) when the top Fock levels carry significant weight."""
    if tail_population > threshold:
        warnings.warn(
            f"population {tail_population:.2e} in top Fock levels exceeds "
            f"{threshold:.0e}; increase fock_cutoff", RuntimeWarning,
            stacklevel=2)
        return True
    return False
