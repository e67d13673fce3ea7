"""Global sparse assembly from batched local contributions."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from fem.dofmap import DofMap

logger = logging.getLogger(__name__)


class AssemblyError(Exception):
    """Raised when local contributions do not fit the global system."""

    pass


@dataclass(frozen=True, eq=False)
class LocalContribution:
    """
    A batch of local matrices and/or load vectors.

    Attributes:
        rows: (b, m) global row dofs of each local block.
        cols: (b, n) global column dofs; defaults to ``rows``.
        matrices: (b, m, n) local matrices, or None for a load-only batch.
        vectors: (b, m) local load vectors, or None for a matrix-only batch.
    """

    rows: np.ndarray
    cols: np.ndarray | None = None
    matrices: np.ndarray | None = None
    vectors: np.ndarray | None = None

    @classmethod
    def single(
        cls,
        rows: np.ndarray,
        matrix: np.ndarray | None = None,
        vector: np.ndarray | None = None,
        cols: np.ndarray | None = None,
    ) -> "LocalContribution":
        """Wrap one local block as a batch of size 1."""
        return cls(
            rows=np.asarray(rows)[None],
            cols=None if cols is None else np.asarray(cols)[None],
            matrices=None if matrix is None else np.asarray(matrix, dtype=float)[None],
            vectors=None if vector is None else np.asarray(vector, dtype=float)[None],
        )


@dataclass(frozen=True, eq=False)
class SparseSystem:
    """Assembled CSR matrix, right-hand side and dof map."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    dofmap: DofMap
    info: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def residual(self, x: np.ndarray) -> float:
        """Relative residual ||Ax - b|| / ||b|| (absolute when b = 0)."""
        r = np.linalg.norm(self.matrix @ x - self.rhs)
        b = np.linalg.norm(self.rhs)
        return float(r / b) if b > 0.0 else float(r)

    def asymmetry(self) -> float:
        """max |A - A^T|."""
        diff = self.matrix - self.matrix.T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def dump(self, path: str | Path) -> Path:
        """Write the matrix in MatrixMarket coordinate format and the rhs next to it."""
        path = Path(path)
        scipy.io.mmwrite(str(path), self.matrix, comment="sbm2d system matrix")
        np.savetxt(path.with_suffix(".rhs.txt"), self.rhs, fmt="%.17e")
        logger.debug(f"Dumped {self.shape[0]}x{self.shape[1]} system to {path}")
        return path


class Assembler:
    """
    Collects local contributions as triplets and compresses them once.

    Triplets are sorted by (row, col, value) before compression, so the
    result does not depend on the order contributions were added in.
    """

    def __init__(self, dofmap: DofMap):
        self.dofmap = dofmap
        self._rows: list[np.ndarray] = []
        self._cols: list[np.ndarray] = []
        self._vals: list[np.ndarray] = []
        self._load_dofs: list[np.ndarray] = []
        self._load_vals: list[np.ndarray] = []

    def _check(self, dofs: np.ndarray, what: str) -> None:
        n = self.dofmap.n_dofs
        if dofs.size and (dofs.min() < 0 or dofs.max() >= n):
            bad = dofs[(dofs < 0) | (dofs >= n)][0]
            raise AssemblyError(f"{what} dof {bad} out of range [0, {n})")

    def add(self, contribution: LocalContribution) -> None:
        """
        Queue a batch of local contributions.

        Raises:
            AssemblyError: If shapes disagree or a dof is out of range.
        """
        rows = np.asarray(contribution.rows, dtype=np.int64)
        if rows.ndim != 2:
            raise AssemblyError(f"Contribution rows must be (b, m), got shape {rows.shape}")
        cols = rows if contribution.cols is None else np.asarray(contribution.cols, dtype=np.int64)
        self._check(rows, "Row")
        self._check(cols, "Column")

        if contribution.matrices is not None:
            mats = np.asarray(contribution.matrices, dtype=float)
            expected = (rows.shape[0], rows.shape[1], cols.shape[1])
            if mats.shape != expected:
                raise AssemblyError(f"Local matrices have shape {mats.shape}, expected {expected}")
            self._rows.append(np.broadcast_to(rows[:, :, None], expected).ravel())
            self._cols.append(np.broadcast_to(cols[:, None, :], expected).ravel())
            self._vals.append(mats.ravel())

        if contribution.vectors is not None:
            vecs = np.asarray(contribution.vectors, dtype=float)
            if vecs.shape != rows.shape:
                raise AssemblyError(f"Local vectors have shape {vecs.shape}, expected {rows.shape}")
            self._load_dofs.append(rows.ravel())
            self._load_vals.append(vecs.ravel())

    def add_triplets(self, rows: np.ndarray, cols: np.ndarray, vals: np.ndarray) -> None:
        """Queue raw (row, col, value) entries."""
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=float).ravel()
        if not (len(rows) == len(cols) == len(vals)):
            raise AssemblyError("Triplet arrays differ in length")
        self._check(rows, "Row")
        self._check(cols, "Column")
        self._rows.append(rows)
        self._cols.append(cols)
        self._vals.append(vals)

    def finalize(self, **info) -> SparseSystem:
        """Sum duplicates, drop explicit zeros and return the CSR system."""
        n = self.dofmap.n_dofs
        if self._vals:
            rows = np.concatenate(self._rows)
            cols = np.concatenate(self._cols)
            vals = np.concatenate(self._vals)
            order = np.lexsort((vals, cols, rows))
            matrix = sp.coo_matrix(
                (vals[order], (rows[order], cols[order])), shape=(n, n)
            ).tocsr()
            matrix.sum_duplicates()
            matrix.eliminate_zeros()
        else:
            matrix = sp.csr_matrix((n, n))

        rhs = np.zeros(n)
        if self._load_vals:
            dofs = np.concatenate(self._load_dofs)
            vals = np.concatenate(self._load_vals)
            order = np.lexsort((vals, dofs))
            rhs = np.bincount(dofs[order], weights=vals[order], minlength=n)

        logger.debug(f"Assembled {n}x{n} system with {matrix.nnz} nonzeros")
        return SparseSystem(matrix=matrix, rhs=rhs, dofmap=self.dofmap, info=dict(info))


def assemble(contributions: list[LocalContribution], dofmap: DofMap) -> SparseSystem:
    """
    Assemble local contributions into a global system.

    Args:
        contributions: Batches of local matrices and load vectors.
        dofmap: Numbering that fixes the system size.

    Returns:
        The compressed system; a zero matrix when ``contributions`` is empty.

    Raises:
        AssemblyError: If any dof index is out of range.
    """
    assembler = Assembler(dofmap)
    for contribution in contributions:
        assembler.add(contribution)
    return assembler.finalize()
