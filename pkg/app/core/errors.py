"""Solver exceptions. Each carries the exit code the CLI reports for it."""


class SolverError(Exception):
    """Base class for everything the library raises on purpose."""

    exit_code = 2


class ConfigurationError(SolverError, ValueError):
    """Bad model parameters, unknown config keys, invalid cutoff."""


class GradedIndexError(SolverError, IndexError):
    """Index outside a block of the graded basis."""


class ShapeError(SolverError, ValueError):
    """A block matrix does not match the shape the graded basis requires."""


class StateValidationError(SolverError, ValueError):
    """Initial state is not a unit-trace Hermitian matrix of the right size."""


class DegenerateBlock(SolverError):
    """Two eigenvalues of one block collide; the block may not be diagonalizable."""

    def __init__(self, label: str, pair: tuple[int, int], values: tuple[complex, complex] | None = None):
        self.label = label
        self.pair = pair
        self.values = values
        detail = f" ({values[0]:.6g} vs {values[1]:.6g})" if values else ""
        super().__init__(f"Degenerate eigenvalues {pair[0]} and {pair[1]} in block {label}{detail}")


class ResonanceError(SolverError):
    """λ^{(l,m)}_μ coincides with an eigenvalue of a lower sector (l,n)."""

    def __init__(self, l: int, m: int, mu: int, n: int, nu: int, gap: float):
        self.l, self.m, self.mu, self.n, self.nu = l, m, mu, n, nu
        self.gap = gap
        super().__init__(
            f"Resonance: eigenvalue (l={l}, m={m}, mu={mu}) meets (l={l}, n={n}, nu={nu}); |gap|={gap:.3g}"
        )


class DivergentSpectrumError(SolverError):
    """A non-decaying eigenvalue carries spectral weight, so the time integrals diverge."""

    exit_code = 3


class SizeGuardError(SolverError):
    """Dense oracle refused a Hilbert space larger than the configured guard."""

    exit_code = 4
