# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Bit-packed GF(2) elimination on C uint64 words (compiled backend).

Same contract as chainforge._gf2py: rows are Python ints with bit j =
column j; a right-hand-side bit rides at position ncols during solves.
"""

from libc.stdlib cimport calloc, free
from libc.string cimport memcpy

ctypedef unsigned long long u64


cdef struct Echelon:
    u64 *rows        # nrows x words, only the first `count` used
    Py_ssize_t *piv  # pivot column per stored row
    Py_ssize_t count
    Py_ssize_t words


cdef inline Py_ssize_t _lowest_bit(u64 *row, Py_ssize_t words) nogil:
    cdef Py_ssize_t w
    cdef u64 v
    cdef Py_ssize_t b
    for w in range(words):
        v = row[w]
        if v:
            b = 0
            while not (v & 1):
                v >>= 1
                b += 1
            return 64 * w + b
    return -1


cdef int _eliminate(list rows, Py_ssize_t ncols, bint with_rhs, list rhs,
                    Echelon *ech) except -1:
    """Build the echelon structure; pivot lookup by column index array."""
    cdef Py_ssize_t nbits = ncols + (1 if with_rhs else 0)
    cdef Py_ssize_t words = (nbits + 63) // 64
    if words == 0:
        words = 1
    cdef Py_ssize_t n = len(rows)
    cdef u64 *work = <u64 *> calloc(max(n, 1) * words, sizeof(u64))
    cdef Py_ssize_t *piv = <Py_ssize_t *> calloc(max(n, 1), sizeof(Py_ssize_t))
    cdef Py_ssize_t *owner = <Py_ssize_t *> calloc(nbits + 1, sizeof(Py_ssize_t))
    if work == NULL or piv == NULL or owner == NULL:
        free(work); free(piv); free(owner)
        raise MemoryError()
    cdef Py_ssize_t i, col, w
    for i in range(nbits + 1):
        owner[i] = -1
    cdef Py_ssize_t count = 0
    cdef bytes blob
    cdef u64 *cur = <u64 *> calloc(words, sizeof(u64))
    if cur == NULL:
        free(work); free(piv); free(owner)
        raise MemoryError()
    cdef Py_ssize_t nbytes = words * 8
    cdef const unsigned char *pb
    cdef u64 *dst
    cdef object rhs_mask = (<object> 1) << ncols  # Python int: ncols can exceed 63
    try:
        for i in range(n):
            value = rows[i]
            if with_rhs and rhs[i]:
                value = value | rhs_mask
            blob = value.to_bytes(nbytes, "little")
            pb = blob
            memcpy(cur, pb, nbytes)
            col = _lowest_bit(cur, words)
            while col >= 0:
                if owner[col] == -1:
                    dst = work + count * words
                    memcpy(dst, cur, nbytes)
                    piv[count] = col
                    owner[col] = count
                    count += 1
                    break
                dst = work + owner[col] * words
                for w in range(words):
                    cur[w] ^= dst[w]
                col = _lowest_bit(cur, words)
        ech.rows = work
        ech.piv = piv
        ech.count = count
        ech.words = words
        free(owner)
        free(cur)
        return 0
    except:
        free(work); free(piv); free(owner); free(cur)
        raise


cdef inline bint _dot_parity(u64 *a, u64 *b, Py_ssize_t words) nogil:
    cdef u64 acc = 0
    cdef Py_ssize_t w
    for w in range(words):
        acc ^= a[w] & b[w]
    acc ^= acc >> 32
    acc ^= acc >> 16
    acc ^= acc >> 8
    acc ^= acc >> 4
    acc ^= acc >> 2
    acc ^= acc >> 1
    return acc & 1


cdef object _back_substitute(Echelon *ech, Py_ssize_t ncols, u64 *x, list order):
    """Solve for pivot bits given free bits preset in x.

    order lists row indices by descending pivot column; the rhs bit, when
    wanted, is preset in x so the dot parity picks it up off the row.
    """
    cdef Py_ssize_t i, col
    cdef u64 *row
    for k in order:
        i = <Py_ssize_t> k
        col = ech.piv[i]
        if col >= ncols:
            continue
        row = ech.rows + i * ech.words
        if _dot_parity(row, x, ech.words):
            x[col >> 6] ^= (<u64>1) << (col & 63)
    return None


cdef object _collect(u64 *x, Py_ssize_t words):
    cdef bytes blob = (<unsigned char *>x)[: words * 8]
    return int.from_bytes(blob, "little")


def rank(rows, ncols):
    cdef Echelon ech
    _eliminate(list(rows), ncols, False, None, &ech)
    cdef Py_ssize_t r = ech.count
    free(ech.rows); free(ech.piv)
    return r


def solve(rows, ncols, rhs):
    """One solution bitmask of A x = b over GF(2), or None."""
    particular, _ = _solve_impl(list(rows), ncols, list(rhs), False)
    return particular


def solve_full(rows, ncols, rhs):
    """(particular solution or None, nullspace basis) for A x = b."""
    return _solve_impl(list(rows), ncols, list(rhs), True)


def nullspace(rows, ncols):
    return _solve_impl(list(rows), ncols, [0] * len(rows), True)[1]


cdef _solve_impl(list rows, Py_ssize_t ncols, list rhs, bint want_null):
    cdef Echelon ech
    _eliminate(rows, ncols, True, rhs, &ech)
    cdef Py_ssize_t words = ech.words
    cdef Py_ssize_t i
    cdef bint feasible = True
    for i in range(ech.count):
        if ech.piv[i] == ncols:
            feasible = False
            break
    cdef u64 *x = <u64 *> calloc(words, sizeof(u64))
    if x == NULL:
        free(ech.rows); free(ech.piv)
        raise MemoryError()
    particular = None
    piv_list = [ech.piv[i] for i in range(ech.count)]
    order = sorted(range(ech.count), key=piv_list.__getitem__, reverse=True)
    try:
        if feasible:
            # Preset the rhs bit in x so the dot parity reads it off each
            # row; clear it again before collecting the solution.
            x[ncols >> 6] |= (<u64>1) << (ncols & 63)
            _back_substitute(&ech, ncols, x, order)
            x[ncols >> 6] &= ~((<u64>1) << (ncols & 63))
            particular = _collect(x, words)
        basis = []
        if want_null:
            pivot_cols = set(piv_list)
            for f in range(ncols):
                if f in pivot_cols:
                    continue
                for i in range(words):
                    x[i] = 0
                x[f >> 6] |= (<u64>1) << (f & 63)
                _back_substitute(&ech, ncols, x, order)
                basis.append(_collect(x, words))
        return particular, basis
    finally:
        free(x)
        free(ech.rows)
        free(ech.piv)
