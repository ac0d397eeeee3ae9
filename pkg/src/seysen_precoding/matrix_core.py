"""Dense real/complex matrix helpers used by the reduction and precoding code.

Real matrices are ``float64`` numpy arrays, complex ones ``complex128``.
Column vectors are 2-D arrays of shape ``(n, 1)``; most functions also accept
a block of column vectors ``(n, F)``.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigError, DimensionError, SingularMatrixError

__all__ = [
    "as_real",
    "as_complex",
    "complex_to_real_matrix",
    "complex_to_real_vector",
    "gram",
    "invert_spd",
    "pseudo_inverse",
    "singular_values",
    "condition_number",
    "trace_inverse_gram",
    "integer_det",
    "read_matrix",
    "write_matrix",
    "format_matrix",
    "parse_matrix",
]

SPD_PIVOT_RTOL = 1e-12


def _finite_2d(M, dtype) -> np.ndarray:
    M = np.asarray(M, dtype=dtype)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains NaN or Inf")
    return M


def as_real(M) -> np.ndarray:
    """Validate and convert to a finite float64 matrix."""
    return _finite_2d(M, np.float64)


def as_complex(M) -> np.ndarray:
    """Validate and convert to a finite complex128 matrix."""
    return _finite_2d(M, np.complex128)


def complex_to_real_matrix(Hc) -> np.ndarray:
    """Real-valued equivalent ``[[Re, -Im], [Im, Re]]`` of a complex matrix."""
    Hc = as_complex(Hc)
    re, im = Hc.real, Hc.imag
    return np.block([[re, -im], [im, re]])


def complex_to_real_vector(v) -> np.ndarray:
    """Stack the real parts above the imaginary parts.

    A block of columns is expanded column by column.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 2:
        raise DimensionError(f"expected a column vector of shape (n, 1), got {v.shape}")
    return np.vstack([v.real, v.imag])


def gram(B) -> np.ndarray:
    B = as_real(B)
    A = B.T @ B
    # symmetrize against rounding in the BLAS kernel
    return 0.5 * (A + A.T)


def invert_spd(A) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky.

    Raises SingularMatrixError when a Cholesky pivot falls below
    ``1e-12`` times the largest diagonal entry.
    """
    A = as_real(A)
    n, m = A.shape
    if n != m:
        raise DimensionError(f"expected a square matrix, got {A.shape}")
    scale = float(np.max(np.abs(np.diag(A))))
    if scale <= 0.0:
        raise SingularMatrixError("matrix has no positive diagonal entry")
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("matrix is not positive definite") from exc
    if np.min(np.diag(L)) ** 2 < SPD_PIVOT_RTOL * scale:
        raise SingularMatrixError("matrix is numerically singular")
    L_inv = np.linalg.inv(L)
    return L_inv.T @ L_inv


def pseudo_inverse(B) -> np.ndarray:
    """Moore-Penrose inverse of a full row rank or full column rank matrix."""
    B = as_real(B)
    m, n = B.shape
    if m <= n:
        return B.T @ invert_spd(B @ B.T)
    return invert_spd(B.T @ B) @ B.T


def singular_values(B) -> np.ndarray:
    """Singular values in descending order."""
    return np.linalg.svd(as_real(B), compute_uv=False)


def condition_number(B) -> float:
    """Ratio of the largest to the smallest singular value."""
    B = as_real(B)
    sv = singular_values(B)
    smin = sv[min(B.shape) - 1]
    if smin <= sv[0] * max(B.shape) * np.finfo(float).eps:
        raise SingularMatrixError("matrix is singular")
    return float(sv[0] / smin)


def trace_inverse_gram(B) -> float:
    """``trace((B^T B)^-1)``."""
    return float(np.trace(invert_spd(gram(B))))


def integer_det(T) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    M = [[int(v) for v in row] for row in np.asarray(T)]
    n = len(M)
    if any(len(row) != n for row in M):
        raise DimensionError("determinant needs a square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


# ---------------------------------------------------------------------------
# Matrix CSV format
#
#   # rows=R cols=C complex=0|1
#   e11,e12,...
#
# Complex entries are written "re:im". Floats use repr() so that reading a
# written file gives back the identical values.
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def format_matrix(M) -> str:
    M = np.asarray(M)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {M.shape}")
    is_complex = np.iscomplexobj(M)
    lines = [f"# rows={M.shape[0]} cols={M.shape[1]} complex={int(is_complex)}"]
    for row in M:
        if is_complex:
            cells = [f"{_fmt(v.real)}:{_fmt(v.imag)}" for v in row]
        else:
            cells = [_fmt(v) for v in row]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_matrix(path: str | os.PathLike, M) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(M))


def _parse_header(line: str) -> tuple[int, int, bool]:
    if not line.startswith("#"):
        raise ConfigError("missing '# rows=R cols=C complex=0|1' header")
    fields = {}
    for tok in line[1:].split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise ConfigError(f"malformed header token {tok!r}")
        fields[key] = val
    try:
        rows, cols, cplx = int(fields["rows"]), int(fields["cols"]), int(fields["complex"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malformed header {line!r}") from exc
    if rows < 1 or cols < 1 or cplx not in (0, 1):
        raise ConfigError(f"invalid header values {line!r}")
    return rows, cols, bool(cplx)


def parse_matrix(text: str) -> np.ndarray:
    """Parse matrix CSV text.

    Returns complex128 for complex files, int64 when every real entry is an
    integer literal, float64 otherwise.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ConfigError("empty matrix file")
    rows, cols, is_complex = _parse_header(lines[0])
    body = lines[1:]
    if len(body) != rows:
        raise ConfigError(f"header says {rows} rows, found {len(body)}")
    cells = [ln.split(",") for ln in body]
    if any(len(c) != cols for c in cells):
        raise ConfigError(f"every row must have {cols} entries")
    try:
        if is_complex:
            vals = []
            for row in cells:
                out = []
                for cell in row:
                    re, sep, im = cell.partition(":")
                    out.append(complex(float(re), float(im) if sep else 0.0))
                vals.append(out)
            M = np.array(vals, dtype=np.complex128)
        elif all(_is_int_literal(c) for row in cells for c in row):
            M = np.array([[int(c) for c in row] for row in cells], dtype=np.int64)
        else:
            M = np.array([[float(c) for c in row] for row in cells], dtype=np.float64)
    except ValueError as exc:
        raise ConfigError(f"unparseable matrix entry: {exc}") from exc
    if not np.all(np.isfinite(M)):
        raise ConfigError("matrix contains NaN or Inf")
    return M


def _is_int_literal(s: str) -> bool:
    s = s.strip()
    return s.lstrip("+-").isdigit()


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())
