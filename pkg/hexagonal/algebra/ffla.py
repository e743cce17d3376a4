"""
Dense linear algebra over a prime field GF(p).

Matrices are numpy int64 arrays with entries in [0, p). The prime is held by a
PrimeField instance; every operation is a pure function of its arguments.
Pivoting always takes the first nonzero entry in column order, so results are
deterministic.
"""
import logging
from typing import Iterable, List, Tuple

import numpy as np
from sympy import isprime

from ..errors import ConfigurationError, InconsistentSystemError

logger = logging.getLogger(__name__)

FpMatrix = np.ndarray

_FLOAT_EXACT = 2 ** 53
_INT_LIMIT = 2 ** 63 - 1


class PrimeField:
    """The field GF(p) together with its matrix kernels."""

    def __init__(self, p: int):
        p = int(p)
        if p < 3 or p >= 2 ** 31 or not isprime(p):
            raise ConfigurationError(f"{p} is not an odd prime below 2^31")
        self.p = p
        square = (p - 1) ** 2
        # inner-product lengths that accumulate exactly in float64 / int64
        self._float_chunk = (_FLOAT_EXACT - p) // square
        self._int_chunk = max(1, (_INT_LIMIT - p) // square)

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    # -- scalars -------------------------------------------------------------

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def normalize(self, a: int) -> int:
        return int(a) % self.p

    # -- construction --------------------------------------------------------

    def array(self, data) -> FpMatrix:
        return np.asarray(data, dtype=np.int64) % self.p

    def zeros(self, shape) -> FpMatrix:
        return np.zeros(shape, dtype=np.int64)

    def identity(self, n: int) -> FpMatrix:
        return np.eye(n, dtype=np.int64)

    def random_matrix(self, rng: np.random.Generator, shape) -> FpMatrix:
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def random_nonzero(self, rng: np.random.Generator) -> int:
        return int(rng.integers(1, self.p))

    # -- products ------------------------------------------------------------

    def matmul(self, a: FpMatrix, b: FpMatrix) -> FpMatrix:
        """Product a·b reduced mod p, exact for any inner dimension."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        n = a.shape[-1]
        out_shape = a.shape[:-1] + b.shape[1:]
        if n == 0:
            return np.zeros(out_shape, dtype=np.int64)
        p = self.p
        if self._float_chunk >= 1:
            af = a.astype(np.float64)
            bf = b.astype(np.float64)
            step = self._float_chunk
            acc = np.zeros(out_shape, dtype=np.float64)
            for start in range(0, n, step):
                part = af[..., start:start + step] @ bf[start:start + step]
                acc = np.fmod(acc + np.fmod(part, p), p)
            return acc.astype(np.int64)
        step = self._int_chunk
        acc = np.zeros(out_shape, dtype=np.int64)
        for start in range(0, n, step):
            acc = (acc + (a[..., start:start + step] @ b[start:start + step]) % p) % p
        return acc

    # -- elimination ---------------------------------------------------------

    def _eliminate(self, m: FpMatrix, full: bool) -> Tuple[FpMatrix, List[int]]:
        p = self.p
        a = np.array(m, dtype=np.int64) % p
        if a.ndim != 2:
            raise ValueError("expected a 2-dimensional matrix")
        rows, cols = a.shape
        pivots: List[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            below = np.flatnonzero(a[r:, c])
            if below.size == 0:
                continue
            piv = r + int(below[0])
            if piv != r:
                a[[r, piv], c:] = a[[piv, r], c:]
            lead = int(a[r, c])
            if lead != 1:
                a[r, c:] = (a[r, c:] * pow(lead, p - 2, p)) % p
            if full:
                column = a[:, c].copy()
                column[r] = 0
                targets = np.flatnonzero(column)
            else:
                targets = r + 1 + np.flatnonzero(a[r + 1:, c])
            if targets.size:
                a[targets, c:] = (a[targets, c:] - np.outer(a[targets, c], a[r, c:]) % p) % p
            pivots.append(c)
            r += 1
        return a, pivots

    def rref(self, m: FpMatrix) -> Tuple[FpMatrix, List[int]]:
        """Reduced row echelon form and the strictly increasing pivot columns."""
        return self._eliminate(m, full=True)

    def rank(self, m: FpMatrix) -> int:
        m = np.asarray(m)
        if m.size == 0:
            return 0
        if m.shape[0] > m.shape[1]:
            m = m.T
        return len(self._eliminate(m, full=False)[1])

    def kernel(self, m: FpMatrix) -> FpMatrix:
        """Columns spanning the right null space of m."""
        m = np.asarray(m, dtype=np.int64)
        cols = m.shape[1]
        if m.shape[0] == 0:
            return self.identity(cols)
        reduced, pivots = self.rref(m)
        pivot_set = set(pivots)
        free = [c for c in range(cols) if c not in pivot_set]
        basis = np.zeros((cols, len(free)), dtype=np.int64)
        if free:
            basis[free, np.arange(len(free))] = 1
            if pivots:
                basis[pivots, :] = (-reduced[:len(pivots)][:, free]) % self.p
        return basis

    def solve(self, a: FpMatrix, b: FpMatrix) -> FpMatrix:
        """Some X with a·X = b; raises InconsistentSystemError naming bad columns."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        vector = b.ndim == 1
        if vector:
            b = b.reshape(-1, 1)
        if a.shape[0] != b.shape[0]:
            raise ValueError(f"row mismatch {a.shape} vs {b.shape}")
        n = a.shape[1]
        reduced, pivots = self.rref(np.hstack([a % self.p, b % self.p]))
        rank_a = sum(1 for c in pivots if c < n)
        residue = reduced[rank_a:, n:]
        bad = [int(j) for j in np.flatnonzero(np.any(residue != 0, axis=0))]
        if bad:
            raise InconsistentSystemError(bad)
        x = np.zeros((n, b.shape[1]), dtype=np.int64)
        if rank_a:
            x[pivots[:rank_a], :] = reduced[:rank_a, n:]
        return x[:, 0] if vector else x

    def in_span(self, a: FpMatrix, v: FpMatrix) -> bool:
        try:
            self.solve(a, v)
        except InconsistentSystemError:
            return False
        return True

    def column_basis(self, m: FpMatrix) -> FpMatrix:
        """A subset of the columns of m forming a basis of its column space."""
        m = np.asarray(m, dtype=np.int64)
        if m.shape[1] == 0:
            return m
        _, pivots = self.rref(m)
        return m[:, pivots] % self.p

    def extend_basis(self, a: FpMatrix, b: FpMatrix) -> Tuple[FpMatrix, List[int]]:
        """Columns of b which, added to the span of a, give a basis of span(a, b)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        na = a.shape[1]
        _, pivots = self.rref(np.hstack([a, b]))
        chosen = [c - na for c in pivots if c >= na]
        return b[:, chosen] % self.p, chosen

    def intersect(self, a: FpMatrix, b: FpMatrix) -> FpMatrix:
        """Basis of column-space(a) ∩ column-space(b), from the kernel of [a | −b]."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[0] != b.shape[0]:
            raise ValueError(f"row mismatch {a.shape} vs {b.shape}")
        if a.shape[1] == 0 or b.shape[1] == 0:
            return np.zeros((a.shape[0], 0), dtype=np.int64)
        null = self.kernel(np.hstack([a, (-b) % self.p]))
        return self.column_basis(self.matmul(a, null[:a.shape[1]]))

    def det(self, m: FpMatrix) -> int:
        p = self.p
        a = np.array(m, dtype=np.int64) % p
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("determinant of a non-square matrix")
        result = 1
        for c in range(n):
            below = np.flatnonzero(a[c:, c])
            if below.size == 0:
                return 0
            piv = c + int(below[0])
            if piv != c:
                a[[c, piv]] = a[[piv, c]]
                result = -result
            lead = int(a[c, c])
            result = (result * lead) % p
            inv = pow(lead, p - 2, p)
            targets = c + 1 + np.flatnonzero(a[c + 1:, c])
            if targets.size:
                factors = (a[targets, c] * inv) % p
                a[targets, c:] = (a[targets, c:] - np.outer(factors, a[c, c:]) % p) % p
        return result % p

    def inverse(self, m: FpMatrix) -> FpMatrix:
        n = np.asarray(m).shape[0]
        if self.rank(m) != n:
            raise ZeroDivisionError("matrix is singular")
        return self.solve(m, self.identity(n))

    def incremental_kernel(self, blocks: Iterable[FpMatrix], cols: int) -> FpMatrix:
        """Kernel of the vertical stack of blocks, narrowed one block at a time."""
        basis = self.identity(cols)
        for block in blocks:
            if basis.shape[1] == 0:
                break
            image = self.matmul(block, basis)
            if not image.any():
                continue
            basis = self.matmul(basis, self.kernel(image))
            logger.debug("[ffla] incremental kernel narrowed to %d", basis.shape[1])
        return basis
