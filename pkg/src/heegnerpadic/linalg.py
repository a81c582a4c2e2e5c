"""Small dense exact linear algebra over any field whose elements support + - * / and == 0."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, List, Sequence

Matrix = List[list]


class SingularMatrix(ArithmeticError):
    pass


def _default_zero(x) -> bool:
    return x == 0


def identity(n: int, one=1, zero=0) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(cols):
            acc = row[0] * B[0][j]
            for k in range(1, inner):
                acc = acc + row[k] * B[k][j]
            new.append(acc)
        out.append(new)
    return out


def matvec(A, v) -> list:
    out = []
    for row in A:
        acc = row[0] * v[0]
        for k in range(1, len(v)):
            acc = acc + row[k] * v[k]
        out.append(acc)
    return out


def transpose(A) -> Matrix:
    return [list(col) for col in zip(*A)]


def rref(A: Sequence[Sequence], is_zero: Callable = _default_zero):
    """Reduced row echelon form. Returns (rows, pivot columns)."""
    M = [list(r) for r in A]
    if not M:
        return M, []
    nrows, ncols = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if not is_zero(M[i][c]):
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = Fraction(1) / M[r][c] if isinstance(M[r][c], (int, Fraction)) else M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(nrows):
            if i != r and not is_zero(M[i][c]):
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace(A: Sequence[Sequence], ncols: int | None = None, zero=0, one=1, is_zero: Callable = _default_zero) -> Matrix:
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    if not A:
        n = ncols or 0
        return [[one if i == j else zero for i in range(n)] for j in range(n)]
    R, pivots = rref(A, is_zero)
    n = len(A[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * n
        v[f] = one
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def rank(A, is_zero: Callable = _default_zero) -> int:
    return len(rref(A, is_zero)[1])


def solve(A, b, is_zero: Callable = _default_zero) -> list:
    """A particular solution x of A x = b; raises SingularMatrix if inconsistent."""
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, pivots = rref(aug, is_zero)
    n = len(A[0])
    if n in pivots:
        raise SingularMatrix("inconsistent system")
    zero = b[0] * 0 if b else 0
    x = [zero] * n
    for row, pc in zip(R, pivots):
        x[pc] = row[n]
    return x


def inverse(A, is_zero: Callable = _default_zero) -> Matrix:
    n = len(A)
    one = A[0][0] ** 0 if not isinstance(A[0][0], (int, Fraction)) else Fraction(1)
    zero = one * 0
    aug = [list(A[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    R, pivots = rref(aug, is_zero)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularMatrix("matrix not invertible")
    return [row[n:] for row in R]


def charpoly(A) -> list:
    """Coefficients c_0..c_n of det(t I - A), via Faddeev-LeVerrier (characteristic 0)."""
    n = len(A)
    one = Fraction(1)
    coeffs = [None] * (n + 1)
    coeffs[n] = one
    M = [[A[i][j] * 0 for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        AM = matmul(A, M) if k > 1 else [[A[i][j] * 0 for j in range(n)] for i in range(n)]
        c_prev = coeffs[n - k + 1]
        M = [[AM[i][j] + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
        AMk = matmul(A, M)
        tr = AMk[0][0]
        for i in range(1, n):
            tr = tr + AMk[i][i]
        coeffs[n - k] = -tr / k
    return coeffs


def det(A) -> object:
    c = charpoly(A)
    n = len(A)
    return c[0] * (-1) ** n
