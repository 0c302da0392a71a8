"""
Excitation grading of the Hilbert space.

The basis {|n,j>} is ordered by ascending n, then j. Block n holds d_n states.
Public indices (j, k, ν) are 1-based; they are converted to 0-based offsets
only where numpy arrays are sliced.

Operators on the sector (l, n), i.e. the span of |n+l, j><n, k|, act on
row-major vectorized d_{n+l} x d_n matrices: entry ν = d_n (j - 1) + k holds M[j, k].
"""
from dataclasses import dataclass, field
from itertools import accumulate

import numpy as np

from app.core.errors import ConfigurationError, GradedIndexError


@dataclass(frozen=True)
class PairBlockShape:
    l: int
    n: int
    rows: int  # d_{n+l}
    cols: int  # d_n

    @property
    def D(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class GradedBasis:
    dims: tuple[int, ...]
    labels: tuple[tuple[str, ...], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ConfigurationError("GradedBasis needs at least the n=0 block")
        if any(d < 1 for d in dims):
            raise ConfigurationError(f"Block dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)
        if self.labels is not None:
            labels = tuple(tuple(block) for block in self.labels)
            if len(labels) != len(dims) or any(len(b) != d for b, d in zip(labels, dims)):
                raise ConfigurationError("labels must give one name per basis state in every block")
            object.__setattr__(self, "labels", labels)

    @property
    def max_excitation(self) -> int:
        return len(self.dims) - 1

    @property
    def total_dimension(self) -> int:
        return sum(self.dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        """0-based position of |n,1> in the global ordering, one entry per block."""
        return tuple(accumulate(self.dims[:-1], initial=0))

    def block_slice(self, n: int) -> slice:
        self._check_block(n)
        start = self.offsets[n]
        return slice(start, start + self.dims[n])

    def index(self, n: int, j: int) -> int:
        """0-based global index of |n,j>."""
        self._check_block(n)
        if not 1 <= j <= self.dims[n]:
            raise GradedIndexError(f"j={j} outside block n={n} of size {self.dims[n]}")
        return self.offsets[n] + j - 1

    def label(self, n: int, j: int) -> str:
        if self.labels is None:
            return f"|{n},{j}>"
        return self.labels[n][self.index(n, j) - self.offsets[n]]

    def pair_shape(self, l: int, n: int) -> PairBlockShape:
        if l < 0 or n < 0 or n + l > self.max_excitation:
            raise GradedIndexError(f"No sector (l={l}, n={n}) for N={self.max_excitation}")
        return PairBlockShape(l=l, n=n, rows=self.dims[n + l], cols=self.dims[n])

    def sectors(self, l: int) -> range:
        """Lower excitation numbers n available on diagonal l."""
        return range(0, self.max_excitation - l + 1)

    def _check_block(self, n: int) -> None:
        if not 0 <= n <= self.max_excitation:
            raise GradedIndexError(f"Block n={n} outside 0..{self.max_excitation}")


def flatten_pair(j: int, k: int, d_n: int) -> int:
    if d_n < 1 or not 1 <= k <= d_n or j < 1:
        raise GradedIndexError(f"Cannot flatten (j={j}, k={k}) with block width {d_n}")
    return d_n * (j - 1) + k


def unflatten_pair(nu: int, d_n: int) -> tuple[int, int]:
    if nu < 1 or d_n < 1:
        raise GradedIndexError(f"Cannot unflatten nu={nu} with block width {d_n}")
    q, r = divmod(nu - 1, d_n)
    return q + 1, r + 1


def total_dimension(basis: GradedBasis) -> int:
    return basis.total_dimension


def grading_operator(basis: GradedBasis) -> np.ndarray:
    """The diagonal excitation-number operator I with I|n,j> = n|n,j>."""
    return np.diag(np.repeat(np.arange(len(basis.dims), dtype=float), basis.dims)).astype(complex)


def vectorize_block(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix).reshape(-1)


def unvectorize_block(vector: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return np.asarray(vector).reshape(rows, cols)
