"""
Fock state algebra
Sparse multimode bosonic states and weighted ensembles of them
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple

import numpy as np

from src.utils.exceptions import DimensionError, UsageError


OccupationVector    = Tuple[int, ...]

PRUNE_THRESHOLD     = 1e-14
NORM_TOLERANCE      = 1e-12


def _as_occupation(counts: Iterable[int]) -> OccupationVector:
    occupation = tuple(int(c) for c in counts)
    if any(c < 0 for c in occupation):
        raise DimensionError(f"Negative photon count in occupation vector {occupation}")
    return occupation


@dataclass(frozen=True, eq=False)
class SparseState:
    """Map from occupation vector to complex amplitude over a fixed number of modes"""
    mode_count: int
    amplitudes: Dict[OccupationVector, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode_count < 0:
            raise DimensionError(f"mode_count must be non-negative, got {self.mode_count}")

        cleaned: Dict[OccupationVector, complex] = {}
        for counts, amplitude in self.amplitudes.items():
            occupation = _as_occupation(counts)
            if len(occupation) != self.mode_count:
                raise DimensionError(
                    f"Occupation vector {occupation} does not have {self.mode_count} modes"
                )
            amplitude = complex(amplitude)
            if abs(amplitude) > PRUNE_THRESHOLD:
                cleaned[occupation] = cleaned.get(occupation, 0j) + amplitude

        ordered = {key: cleaned[key] for key in sorted(cleaned)}
        object.__setattr__(self, "amplitudes", ordered)

    @classmethod
    def basis(cls, counts: Sequence[int]) -> "SparseState":
        """Single Fock basis state |counts>"""
        occupation = _as_occupation(counts)
        return cls(len(occupation), {occupation: 1.0})

    @classmethod
    def vacuum(cls, mode_count: int) -> "SparseState":
        return cls(mode_count, {(0,) * mode_count: 1.0})

    @classmethod
    def superposition(
        cls,
        terms: Mapping[Sequence[int], complex],
        normalize: bool = True
    ) -> "SparseState":
        """
        Build a state from a mapping of occupation vectors to amplitudes

        Args:
            terms: Occupation vector -> amplitude
            normalize: Rescale to unit norm

        Returns:
            SparseState
        """
        if not terms:
            raise DimensionError("A superposition needs at least one term")

        keys        = [_as_occupation(k) for k in terms]
        mode_count  = len(keys[0])
        state       = cls(mode_count, {k: complex(v) for k, v in zip(keys, terms.values())})
        return state.normalized() if normalize else state

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def is_normalized(self, tolerance: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tolerance

    def normalized(self) -> "SparseState":
        norm = self.norm()
        if norm == 0.0:
            raise UsageError("Cannot normalize the zero state")
        return SparseState(self.mode_count, {k: a / norm for k, a in self.amplitudes.items()})

    def scaled(self, factor: complex) -> "SparseState":
        return SparseState(self.mode_count, {k: a * factor for k, a in self.amplitudes.items()})

    def is_zero(self) -> bool:
        return not self.amplitudes

    def amplitude(self, counts: Sequence[int]) -> complex:
        return self.amplitudes.get(tuple(counts), 0j)

    def partition_by_mode(self, position: int) -> Dict[int, "SparseState"]:
        """
        Split the state by the photon count found in one mode

        Args:
            position: Index of the mode inside the occupation vector

        Returns:
            Photon count -> unnormalized state over the remaining modes
        """
        if not 0 <= position < self.mode_count:
            raise DimensionError(
                f"Mode position {position} out of range [0, {self.mode_count - 1}]"
            )
        parts: Dict[int, Dict[OccupationVector, complex]] = {}
        for counts, amplitude in self.amplitudes.items():
            n       = counts[position]
            rest    = counts[:position] + counts[position + 1:]
            parts.setdefault(n, {})[rest] = amplitude

        return {
            n: SparseState(self.mode_count - 1, amps)
            for n, amps in sorted(parts.items())
        }

    def to_vector(self, basis: Sequence[OccupationVector]) -> np.ndarray:
        """Dense amplitude vector on an explicit basis (components outside it are dropped)"""
        index   = {tuple(b): i for i, b in enumerate(basis)}
        vector  = np.zeros(len(basis), dtype=complex)
        for counts, amplitude in self.amplitudes.items():
            if counts in index:
                vector[index[counts]] = amplitude
        return vector

    def __len__(self) -> int:
        return len(self.amplitudes)

    def __repr__(self) -> str:
        terms = " + ".join(
            f"({a.real:.6g}{a.imag:+.6g}j)|{','.join(map(str, k))}>"
            for k, a in self.amplitudes.items()
        )
        return f"SparseState({self.mode_count} modes: {terms or '0'})"


class Branch(NamedTuple):
    """One pure component of an ensemble"""
    weight: float
    state: SparseState


@dataclass(frozen=True, eq=False)
class Ensemble:
    """
    Sub-normalized mixture of pure branches, rho = sum_b w_b |phi_b><phi_b|

    `modes` lists the circuit mode labels still present, in occupation-vector
    order; measured modes disappear from it.
    """
    branches: Tuple[Branch, ...]
    modes: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(Branch(float(w), s) for w, s in self.branches))
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))

        if len(set(self.modes)) != len(self.modes):
            raise DimensionError(f"Duplicate mode labels {self.modes}")

        for branch in self.branches:
            if branch.weight < 0.0:
                raise DimensionError(f"Negative branch weight {branch.weight}")
            if branch.state.mode_count != len(self.modes):
                raise DimensionError(
                    f"Branch over {branch.state.mode_count} modes in an ensemble over "
                    f"{len(self.modes)} modes"
                )

    @classmethod
    def pure(cls, state: SparseState, modes: Optional[Sequence[int]] = None) -> "Ensemble":
        """Ensemble holding one normalized state with weight 1"""
        labels = tuple(range(state.mode_count)) if modes is None else tuple(modes)
        return cls((Branch(1.0, state.normalized()),), labels)

    @classmethod
    def empty(cls, modes: Sequence[int]) -> "Ensemble":
        return cls((), tuple(modes))

    @property
    def mode_count(self) -> int:
        return len(self.modes)

    def total_weight(self) -> float:
        return math.fsum(b.weight for b in self.branches)

    def position_of(self, mode: int) -> int:
        """
        Position of a circuit mode inside the occupation vectors

        Raises:
            UsageError: If the mode was already measured or never existed
        """
        try:
            return self.modes.index(mode)
        except ValueError:
            raise UsageError(f"Mode {mode} is not present (remaining modes: {list(self.modes)})")

    def density_matrix(self, basis: Sequence[OccupationVector]) -> np.ndarray:
        """Dense rho on an explicit basis; used for comparing ensembles"""
        rho = np.zeros((len(basis), len(basis)), dtype=complex)
        for weight, state in self.branches:
            vector  = state.to_vector(basis)
            rho     += weight * np.outer(vector, vector.conj())
        return rho

    def support(self) -> List[OccupationVector]:
        keys: Set[OccupationVector] = set()
        for branch in self.branches:
            keys.update(branch.state.amplitudes)
        return sorted(keys)


def tensor(a: SparseState, b: SparseState) -> SparseState:
    """
    Tensor product a (x) b, modes of `a` first

    Args:
        a: Left factor
        b: Right factor

    Returns:
        State over a.mode_count + b.mode_count modes
    """
    amplitudes = {
        ka + kb: va * vb
        for ka, va in a.amplitudes.items()
        for kb, vb in b.amplitudes.items()
    }
    return SparseState(a.mode_count + b.mode_count, amplitudes)


def inner_product(a: SparseState, b: SparseState) -> complex:
    """
    <a|b>, conjugate-linear in `a`

    Raises:
        DimensionError: If the states have different mode counts
    """
    if a.mode_count != b.mode_count:
        raise DimensionError(
            f"Inner product between {a.mode_count}-mode and {b.mode_count}-mode states"
        )

    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for counts, amplitude in small.amplitudes.items():
        other = large.amplitudes.get(counts)
        if other is not None:
            total += amplitude.conjugate() * other if small is a else other.conjugate() * amplitude
    return total


def total_photon_number(s: SparseState) -> Set[int]:
    """Set of total photon numbers carried by the components of the state"""
    return {sum(counts) for counts in s.amplitudes}


def ensembles_distance(a: Ensemble, b: Ensemble) -> float:
    """
    Largest absolute entry of rho_a - rho_b

    Raises:
        DimensionError: If the ensembles are over different modes
    """
    if a.modes != b.modes:
        raise DimensionError(f"Ensembles over different modes: {a.modes} vs {b.modes}")

    basis = sorted(set(a.support()) | set(b.support()))
    if not basis:
        return 0.0
    return float(np.max(np.abs(a.density_matrix(basis) - b.density_matrix(basis))))
