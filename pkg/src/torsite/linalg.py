"""Exact linear algebra over Z/n.

Spans of row vectors are represented by matrices in Howell normal form,
which is a canonical representative: two generating sets span the same
submodule of (Z/n)^w iff their Howell forms are byte-identical.  For prime
n the form degenerates to the reduced row echelon form over the field.

Row-vector convention throughout the package: a linear map is applied as
``v @ M`` and composites read left to right (``first @ then``).
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import BudgetExceededError


def _xgcd(a: int, b: int):
    """Return (g, u, v) with u*a + v*b == g == gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def modinv(a: int, n: int) -> int:
    g, u, _ = _xgcd(a % n, n)
    if g != 1:
        raise ValueError(f"{a} is not invertible mod {n}")
    return u % n


def unit_for(a: int, n: int) -> int:
    """A unit u mod n with (u * a) % n == gcd(a, n)."""
    a %= n
    d = math.gcd(a, n)
    if d == n:
        return 1
    m = n // d
    u = modinv((a // d) % m, m)
    while math.gcd(u, n) != 1:
        u += m
    return u % n


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def as_matrix(rows, width: int) -> np.ndarray:
    """Coerce a row list / array to an int64 matrix of the given width."""
    a = np.array(rows, dtype=np.int64)
    if a.size == 0:
        return np.zeros((0, width), dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.shape[1] != width:
        raise ValueError(f"expected width {width}, got {a.shape[1]}")
    return a


def _leading(row) -> int:
    nz = np.flatnonzero(row)
    return int(nz[0]) if nz.size else -1


def _echelon(rows: list, n: int, width: int) -> list:
    work = [r % n for r in rows if (r % n).any()]
    r = 0
    for j in range(width):
        pivot = False
        for i in range(r, len(work)):
            if work[i][j] % n == 0:
                continue
            if not pivot:
                work[r], work[i] = work[i], work[r]
                pivot = True
            else:
                a = int(work[r][j])
                b = int(work[i][j])
                g, u, v = _xgcd(a, b)
                comb = (u * work[r] + v * work[i]) % n
                elim = ((b // g) * work[r] - (a // g) * work[i]) % n
                work[r], work[i] = comb, elim
        if pivot:
            a = int(work[r][j])
            d = math.gcd(a, n)
            work[r] = (unit_for(a, n) * work[r]) % n
            for i in range(r):
                q = int(work[i][j]) // d
                if q:
                    work[i] = (work[i] - q * work[r]) % n
            r += 1
    return work[:r]


def howell_form(rows, n: int, width: int | None = None) -> np.ndarray:
    """Canonical Howell form of the span of the given rows.

    Beyond echelon shape (increasing pivot columns, pivots dividing n,
    entries above a pivot reduced modulo it) the result satisfies the
    Howell property: any span element supported on columns >= j lies in
    the span of the rows with leading column >= j.  That last property is
    what makes kernel extraction from an augmented form correct over a
    non-field Z/n.
    """
    if width is None:
        a = np.asarray(rows, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("width is required for ambiguous input")
        width = a.shape[1]
    mat = as_matrix(rows, width)
    work = _echelon(list(mat), n, width)
    # enforce the Howell property: annihilator multiples of each row must
    # already lie in the span of the lower rows
    for _ in range(width * (n.bit_length() + 2) + 8):
        extra = []
        for row in work:
            d = int(row[_leading(row)])
            t = n // math.gcd(d, n)
            if t > 1:
                v = (t * row) % n
                if v.any():
                    extra.append(v)
        if not extra:
            break
        new = _echelon(work + extra, n, width)
        if len(new) == len(work) and all(
            (a == b).all() for a, b in zip(new, work)
        ):
            break
        work = new
    else:  # pragma: no cover
        raise RuntimeError("howell iteration failed to stabilize")
    if not work:
        return np.zeros((0, width), dtype=np.int64)
    return np.array(work, dtype=np.int64)


def span_key(H: np.ndarray) -> bytes:
    """Hashable identity of a span given by its Howell form."""
    return H.shape[0].to_bytes(4, "little") + H.tobytes()


def reduce_vector(H: np.ndarray, v, n: int) -> np.ndarray:
    """Remainder of v after reduction against a Howell form H."""
    r = np.array(v, dtype=np.int64) % n
    for row in H:
        j = _leading(row)
        d = int(row[j])
        q = int(r[j]) // d
        if q:
            r = (r - q * row) % n
    return r


def in_span(H: np.ndarray, v, n: int) -> bool:
    return not reduce_vector(H, v, n).any()


def spans_equal(A: np.ndarray, B: np.ndarray, n: int) -> bool:
    return span_key(howell_form(A, n, A.shape[1])) == span_key(
        howell_form(B, n, B.shape[1])
    )


def solve_left(A, b, n: int):
    """One solution x of x @ A == b (mod n), or None.

    A has shape (m, k); x has length m.  Works for any modulus thanks to
    the Howell property of the augmented form.
    """
    A = np.asarray(A, dtype=np.int64)
    m, k = A.shape
    b = np.asarray(b, dtype=np.int64) % n
    if m == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    aug = np.hstack([A % n, np.eye(m, dtype=np.int64)])
    H = howell_form(aug, n, k + m)
    x = np.zeros(m, dtype=np.int64)
    r = b.copy()
    for row in H:
        j = _leading(row)
        if j >= k:
            break
        d = int(row[j])
        if int(r[j]) % d:
            return None
        q = int(r[j]) // d
        r = (r - q * row[:k]) % n
        x = (x + q * row[k:]) % n
    if r.any():
        return None
    return x


def kernel_left(A, n: int) -> np.ndarray:
    """Howell basis of {x : x @ A == 0 (mod n)}."""
    A = np.asarray(A, dtype=np.int64)
    m, k = A.shape
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64)
    aug = np.hstack([A % n, np.eye(m, dtype=np.int64)])
    H = howell_form(aug, n, k + m)
    out = [row[k:] for row in H if not row[:k].any()]
    return as_matrix(out, m)


def matrix_inverse(A, n: int):
    """Two-sided inverse of a square matrix mod n, or None."""
    A = np.asarray(A, dtype=np.int64) % n
    k = A.shape[0]
    if A.shape != (k, k):
        raise ValueError("matrix_inverse needs a square matrix")
    rows = []
    for i in range(k):
        e = np.zeros(k, dtype=np.int64)
        e[i] = 1
        x = solve_left(A, e, n)
        if x is None:
            return None
        rows.append(x)
    X = np.array(rows, dtype=np.int64)
    if ((X @ A) % n != np.eye(k, dtype=np.int64)).any():
        return None
    if ((A @ X) % n != np.eye(k, dtype=np.int64)).any():
        return None
    return X


def span_size(H: np.ndarray, n: int) -> int:
    size = 1
    for row in H:
        size *= n // int(row[_leading(row)])
    return size


def span_elements(H: np.ndarray, n: int):
    """All elements of the span, each exactly once (H in Howell form)."""
    w = H.shape[1]
    if H.shape[0] == 0:
        yield np.zeros(w, dtype=np.int64)
        return
    ranges = [range(n // int(row[_leading(row)])) for row in H]
    for coeffs in itertools.product(*ranges):
        yield (np.array(coeffs, dtype=np.int64) @ H) % n


def all_vectors(width: int, n: int):
    for tup in itertools.product(range(n), repeat=width):
        yield np.array(tup, dtype=np.int64)


def stable_closure(gens, mats, n: int, width: int) -> np.ndarray:
    """Smallest span containing gens and stable under v -> v @ M for each M."""
    H = howell_form(as_matrix(gens, width), n, width)
    while True:
        images = [H] + [(H @ M) % n for M in mats if H.shape[0]]
        H2 = howell_form(np.vstack(images) if len(images) > 1 else H, n, width)
        if span_key(H2) == span_key(H):
            return H
        H = H2


def enumerate_submodules(width: int, n: int, stable_under=(), budget: int | None = None):
    """All submodules of (Z/n)^width stable under right multiplication.

    Breadth-first closure: grow each known submodule by one ambient element
    at a time.  Returns Howell forms sorted by (size, bytes) so the output
    order is deterministic.
    """
    if budget is not None and n**width > budget:
        raise BudgetExceededError("submodule enumeration", n**width, budget)
    mats = [np.asarray(M, dtype=np.int64) % n for M in stable_under]
    elements = [v for v in all_vectors(width, n) if v.any()]
    zero = np.zeros((0, width), dtype=np.int64)
    found = {span_key(zero): zero}
    frontier = [zero]
    while frontier:
        S = frontier.pop()
        for v in elements:
            if in_span(S, v, n):
                continue
            gens = np.vstack([S, v.reshape(1, -1)]) if S.shape[0] else v.reshape(1, -1)
            T = stable_closure(gens, mats, n, width)
            k = span_key(T)
            if k not in found:
                if budget is not None and len(found) >= budget:
                    raise BudgetExceededError("submodule enumeration", len(found) + 1, budget)
                found[k] = T
                frontier.append(T)
    return sorted(found.values(), key=lambda H: (span_size(H, n), span_key(H)))


def pivot_columns(H: np.ndarray) -> list:
    return [_leading(row) for row in H]


def complement_columns(H: np.ndarray, width: int) -> list:
    piv = set(pivot_columns(H))
    return [j for j in range(width) if j not in piv]
