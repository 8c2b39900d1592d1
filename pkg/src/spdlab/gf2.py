"""GF(2^k) arithmetic and bit-packed linear algebra over F_2.

Field elements are plain ints in [0, 2^k): bit i is the coefficient of z^i,
and the coordinate map to F_2^k is the identity on bit patterns.  Matrices
are row-major tuples of ints, bit j of a row word being the entry in
column j.  Python ints are arbitrary precision, so there is no word-size
limit to worry about.

Constraint systems follow the row-vector convention throughout: an unknown
row vector x satisfies x * M = B, and coefficient vectors multiply
evaluation matrices from the left.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import InfeasibleSystemError

# Lexicographically-first irreducible polynomial of each degree k, as a bit
# pattern (bit i = coefficient of z^i).  Keys 1..20; also in the README.
MODULUS_TABLE = {
    1: 0x2,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
    17: 0x20009,
    18: 0x40009,
    19: 0x80027,
    20: 0x100009,
}

MODULUS_TABLE_ENV = "SPDLAB_MODULUS_TABLE"


def _pdeg(p: int) -> int:
    return p.bit_length() - 1


def _pmod(a: int, m: int) -> int:
    dm = _pdeg(m)
    while a and _pdeg(a) >= dm:
        a ^= m << (_pdeg(a) - dm)
    return a


def poly_is_irreducible(p: int) -> bool:
    """Exhaustive divisor search; practical for degrees up to ~20."""
    d = _pdeg(p)
    if d <= 0:
        return False
    for q in range(2, 1 << (d // 2 + 1)):
        if 1 <= _pdeg(q) <= d // 2 and _pmod(p, q) == 0:
            return False
    return True


@dataclass(frozen=True)
class GF2kField:
    """The field GF(2^k) presented by an explicit degree-k modulus."""

    k: int
    modulus: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"extension degree must be positive, got {self.k}")
        if _pdeg(self.modulus) != self.k:
            raise ValueError(
                f"modulus {bin(self.modulus)} does not have degree {self.k}"
            )

    @property
    def order(self) -> int:
        return 1 << self.k

    def check_element(self, a: int) -> None:
        if not 0 <= a < self.order:
            raise ValueError(f"element {a} out of range for GF(2^{self.k})")


def default_field(k: int) -> GF2kField:
    """Field with the table modulus for k; SPDLAB_MODULUS_TABLE overrides.

    The override is a JSON file mapping k to a modulus (int or hex string).
    """
    path = os.environ.get(MODULUS_TABLE_ENV)
    if path:
        with open(path) as fh:
            table = json.load(fh)
        entry = table.get(str(k))
        if entry is not None:
            modulus = int(entry, 16) if isinstance(entry, str) else int(entry)
            return GF2kField(k, modulus)
    if k not in MODULUS_TABLE:
        raise ValueError(f"no modulus on record for k={k} (table covers 1..20)")
    return GF2kField(k, MODULUS_TABLE[k])


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(a: int, b: int, field: GF2kField) -> int:
    """Product in GF(2^k): shift-and-add with reduction by the modulus."""
    field.check_element(a)
    field.check_element(b)
    top = 1 << field.k
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= field.modulus
    return r


def gf_pow(a: int, e: int, field: GF2kField) -> int:
    """a^e with the empty-product convention a^0 = 1 (including 0^0 = 1)."""
    field.check_element(a)
    if e < 0:
        raise ValueError("negative exponents not supported")
    r = 1
    base = a
    while e:
        if e & 1:
            r = gf_mul(r, base, field)
        base = gf_mul(base, base, field)
        e >>= 1
    return r


# ---------------------------------------------------------------------------
# bit-packed matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GF2Matrix:
    """Immutable row-major bit-packed matrix over F_2."""

    nrows: int
    ncols: int
    rows: Tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ValueError("row count mismatch")
        mask = (1 << self.ncols) - 1
        for r in self.rows:
            if r & ~mask:
                raise ValueError("row word has bits beyond ncols")

    @staticmethod
    def zero(nrows: int, ncols: int) -> "GF2Matrix":
        return GF2Matrix(nrows, ncols, (0,) * nrows)

    @staticmethod
    def identity(n: int) -> "GF2Matrix":
        return GF2Matrix(n, n, tuple(1 << i for i in range(n)))

    @staticmethod
    def from_rows(rows: Sequence[int], ncols: int) -> "GF2Matrix":
        return GF2Matrix(len(rows), ncols, tuple(rows))

    @staticmethod
    def from_cols(cols: Sequence[int], nrows: int) -> "GF2Matrix":
        rows = [0] * nrows
        for j, c in enumerate(cols):
            for i in range(nrows):
                if (c >> i) & 1:
                    rows[i] |= 1 << j
        return GF2Matrix(nrows, len(cols), tuple(rows))

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def column(self, j: int) -> int:
        """Column j as an int with bit i = entry (i, j)."""
        c = 0
        for i in range(self.nrows):
            c |= ((self.rows[i] >> j) & 1) << i
        return c

    def columns(self) -> List[int]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "GF2Matrix":
        return GF2Matrix.from_cols(list(self.rows), self.ncols)

    def __add__(self, other: "GF2Matrix") -> "GF2Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return GF2Matrix(
            self.nrows, self.ncols,
            tuple(a ^ b for a, b in zip(self.rows, other.rows)),
        )

    def __matmul__(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        return GF2Matrix(
            self.nrows, other.ncols,
            tuple(row_times(r, other) for r in self.rows),
        )

    def append_column(self, col: int) -> "GF2Matrix":
        rows = [
            r | (((col >> i) & 1) << self.ncols)
            for i, r in enumerate(self.rows)
        ]
        return GF2Matrix(self.nrows, self.ncols + 1, tuple(rows))

    def to_text(self) -> str:
        return "\n".join(
            "".join(str((r >> j) & 1) for j in range(self.ncols))
            for r in self.rows
        )

    @staticmethod
    def from_text(text: str) -> "GF2Matrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            return GF2Matrix(0, 0, ())
        ncols = len(lines[0])
        rows = []
        for ln in lines:
            if len(ln) != ncols or any(ch not in "01" for ch in ln):
                raise ValueError(f"malformed matrix row {ln!r}")
            rows.append(sum((1 << j) for j, ch in enumerate(ln) if ch == "1"))
        return GF2Matrix(len(lines), ncols, tuple(rows))


def row_times(x: int, a: GF2Matrix) -> int:
    """Row vector (int, a.nrows bits) times matrix: XOR of selected rows."""
    acc = 0
    i = 0
    while x:
        if x & 1:
            acc ^= a.rows[i]
        x >>= 1
        i += 1
    return acc


class Gf2Span:
    """Incremental span of int bit-vectors, kept as a reduced pivot basis."""

    def __init__(self, vectors: Iterable[int] = ()):
        self._pivots: dict[int, int] = {}  # pivot bit index -> basis vector
        for v in vectors:
            self.add(v)

    def reduce(self, v: int) -> int:
        while v:
            p = v.bit_length() - 1
            b = self._pivots.get(p)
            if b is None:
                return v
            v ^= b
        return 0

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def add(self, v: int) -> bool:
        """Add v to the span; True if it was independent of the basis."""
        v = self.reduce(v)
        if v == 0:
            return False
        self._pivots[v.bit_length() - 1] = v
        return True

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def basis(self) -> List[int]:
        return [self._pivots[p] for p in sorted(self._pivots)]


def rank(a: GF2Matrix) -> int:
    span = Gf2Span(a.rows)
    return span.rank


def _rref(rows: List[int], aug: Optional[List[int]] = None):
    """Reduced row echelon form in place; returns list of pivot columns.

    Pivot of a row is its lowest set bit, so pivot columns come out in
    increasing column order.
    """
    if aug is None:
        aug = [0] * len(rows)
    pivot_cols: List[int] = []
    pivot_rows: List[int] = []
    for i in range(len(rows)):
        r, b = rows[i], aug[i]
        for pc, pi in zip(pivot_cols, pivot_rows):
            if (r >> pc) & 1:
                r ^= rows[pi]
                b ^= aug[pi]
        rows[i], aug[i] = r, b
        if r:
            pc = (r & -r).bit_length() - 1
            # clear this column from earlier pivot rows
            for pi in pivot_rows:
                if (rows[pi] >> pc) & 1:
                    rows[pi] ^= r
                    aug[pi] ^= b
            pivot_cols.append(pc)
            pivot_rows.append(i)
    order = sorted(range(len(pivot_cols)), key=lambda t: pivot_cols[t])
    reduced = [(pivot_cols[t], rows[pivot_rows[t]], aug[pivot_rows[t]]) for t in order]
    return reduced, aug


def _kernel_from_reduced(reduced, n_unknowns: int) -> List[int]:
    pivot_cols = {pc for pc, _, _ in reduced}
    basis = []
    for j in range(n_unknowns):
        if j in pivot_cols:
            continue
        v = 1 << j
        for pc, row, _ in reduced:
            if (row >> j) & 1:
                v |= 1 << pc
        basis.append(v)
    return basis


def right_kernel(a: GF2Matrix) -> List[int]:
    """Basis of {y (column, ncols bits) : a @ y = 0}."""
    rows = list(a.rows)
    reduced, _ = _rref(rows)
    return _kernel_from_reduced(reduced, a.ncols)


def left_kernel(a: GF2Matrix) -> List[int]:
    """Basis of {x (row, nrows bits) : x * a = 0}."""
    return right_kernel(a.transpose())


def in_span(cols: Sequence[int] | GF2Matrix, v: int) -> bool:
    """Whether v lies in the span of the given column vectors."""
    vectors = cols.columns() if isinstance(cols, GF2Matrix) else cols
    return Gf2Span(vectors).contains(v)


def solve_linear_rows(
    constraints: Sequence[int], n_unknowns: int, rhs: Sequence[int]
) -> Tuple[int, List[int]]:
    """Solve <c_j, x> = rhs_j over F_2 for an n_unknowns-bit vector x.

    Each constraint is a bit vector; <c, x> is the parity of c & x.
    Returns (particular solution, kernel basis); raises
    InfeasibleSystemError when inconsistent.
    """
    rows = list(constraints)
    aug = list(rhs)
    reduced, aug_after = _rref(rows, aug)
    for r, bb in zip(rows, aug_after):
        if r == 0 and bb:
            raise InfeasibleSystemError("linear system has no solution")
    x0 = 0
    for pc, _, bb in reduced:
        if bb:
            x0 |= 1 << pc
    return x0, _kernel_from_reduced(reduced, n_unknowns)


def solve_affine(m: GF2Matrix, b: int) -> Tuple[int, List[int]]:
    """Solve x * m = b for a row vector x (m.nrows bits).

    Returns (particular solution, basis of the homogeneous kernel), so the
    full solution set is {x0 + span(basis)}.  Raises InfeasibleSystemError
    when the system has no solution; a feasible system with a unique
    solution returns an empty kernel basis.
    """
    # constraint j of x * m = b is <column_j, x> = b_j
    return solve_linear_rows(
        m.columns(), m.nrows, [(b >> j) & 1 for j in range(m.ncols)]
    )


# ---------------------------------------------------------------------------
# multiplication and evaluation matrices
# ---------------------------------------------------------------------------


def mult_matrix(alpha: int, field: GF2kField) -> GF2Matrix:
    """k x k matrix of multiplication by alpha: M(a) * phi(b) = phi(a*b).

    Column j is the bit pattern of alpha * z^j.
    """
    k = field.k
    cols = [gf_mul(alpha, 1 << j, field) for j in range(k)]
    return GF2Matrix.from_cols(cols, k)


def eval_matrix(alpha: int, d: int, field: GF2kField) -> GF2Matrix:
    """dk x k matrix with [f] * Eval = phi(f(alpha)) for row vectors [f].

    [f] is the concatenation of the coefficient bit patterns of f, lowest
    degree first.  Block i must act on phi(a_i) from the right, so its row
    u is the bit pattern of alpha^i * z^u (the transpose of mult_matrix of
    alpha^i).
    """
    if d < 1:
        raise ValueError("degree bound d must be >= 1")
    k = field.k
    rows = []
    power = 1
    for _ in range(d):
        for u in range(k):
            rows.append(gf_mul(power, 1 << u, field))
        power = gf_mul(power, alpha, field)
    return GF2Matrix.from_rows(rows, k)
