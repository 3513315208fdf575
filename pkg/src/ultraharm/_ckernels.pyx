# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sparse kernels for the group Fourier transform.

Each irrep matrix has one nonzero per column, so a transform block costs
|G/G_N| * dim phase evaluations.  Phases are computed as exact integers modulo
p^L and only looked up in a table of roots of unity at the last moment.

For a fixed x the phase along the rows of pi(x) is a polynomial of degree at
most two in the row index, so :func:`fill` walks the rows with additions and
conditional subtractions only; the integer divisions happen once per x.
"""

from libc.math cimport M_PI, sin
from libc.stdlib cimport free, malloc


cdef inline long long pmod(long long a, long long q) noexcept nogil:
    cdef long long r = a % q
    if r < 0:
        r += q
    return r


cdef inline long long addmod(long long a, long long b, long long q) noexcept nogil:
    # a, b in [0, q)
    a += b
    if a >= q:
        a -= q
    return a


cdef void fill(int kind, int d, int dim, long long qL, long long qm, long long inv2,
               const long long* a, const long long* x, Py_ssize_t D,
               long long* col, long long* ph, long long* digits) noexcept nogil:
    """Column index and integer phase of the nonzero in every row h of pi(x).

    ``x`` is reduced modulo qL; ``digits`` is scratch space of length 2 d.
    Row h has its nonzero in column h + x_1 (coordinatewise modulo qm).
    """
    cdef Py_ssize_t h
    cdef long long base = 0, c, step, curv, inc, wrap, cw
    cdef int i, j
    if kind == 0:
        for j in range(dim):
            base = (base + a[j] * x[j]) % qL
        col[0] = 0
        ph[0] = base
    elif kind == 1:
        # H_d: phase base + a_{2d} sum_i x_{d+i} h_i, column digits h_i + x_i
        for j in range(dim):
            base = (base + a[j] * x[j]) % qL
        c = 0
        cw = 1
        for i in range(d):
            digits[i] = 0
            digits[d + i] = x[i] % qm
            c += digits[d + i] * cw
            cw *= qm
        for h in range(D):
            col[h] = c
            ph[h] = base
            if h + 1 == D:
                break
            # advance the mixed-radix counter of the row and follow with the column
            cw = 1
            for i in range(d):
                inc = (a[2 * d] * x[d + i]) % qL
                digits[i] += 1
                base = addmod(base, inc, qL)
                if digits[d + i] + 1 == qm:
                    digits[d + i] = 0
                    c -= (qm - 1) * cw
                else:
                    digits[d + i] += 1
                    c += cw
                if digits[i] < qm:
                    break
                digits[i] = 0
                wrap = (qm % qL) * inc % qL
                base = pmod(base - wrap, qL)
                cw *= qm
    elif kind == 2:
        # B_4: phase K0 + K1 h + K2 h^2 with K2 = a_3 x_1 / 2
        base = (a[0] * x[0] + a[1] * x[1] + a[2] * x[2] + a[3] * x[3]) % qL
        step = (a[2] * x[1] + a[3] * x[2] + (a[3] * x[1] % qL) * inv2) % qL
        curv = (a[3] * x[1] % qL) * inv2 % qL
        curv = addmod(curv, curv, qL)
        c = x[0] % qm
        for h in range(D):
            col[h] = c
            ph[h] = base
            base = addmod(base, step, qL)
            step = addmod(step, curv, qL)
            c += 1
            if c == qm:
                c = 0
    elif kind == 3:
        # G_5,2: phase base + (a_3 x_1 + a_4 x_2) h
        for j in range(dim):
            base = (base + a[j] * x[j]) % qL
        step = (a[3] * x[1] + a[4] * x[2]) % qL
        c = x[0] % qm
        for h in range(D):
            col[h] = c
            ph[h] = base
            base = addmod(base, step, qL)
            c += 1
            if c == qm:
                c = 0


cdef class _Scratch:
    cdef long long* col
    cdef long long* ph
    cdef long long* digits
    cdef long long* x

    def __cinit__(self, Py_ssize_t D, int dim):
        self.col = <long long*> malloc(max(D, 1) * sizeof(long long))
        self.ph = <long long*> malloc(max(D, 1) * sizeof(long long))
        self.digits = <long long*> malloc(max(2 * dim, 2) * sizeof(long long))
        self.x = <long long*> malloc(max(dim, 1) * sizeof(long long))
        if not (self.col and self.ph and self.digits and self.x):
            raise MemoryError()

    def __dealloc__(self):
        free(self.col)
        free(self.ph)
        free(self.digits)
        free(self.x)


def forward_block(int kind, int d, long long p, int m, int L,
                  const long long[::1] a, const long long[:, ::1] X,
                  const double complex[::1] f, const double complex[::1] roots,
                  double complex[:, ::1] out):
    """Accumulate sum_x f(x) pi(x)^* into ``out`` (shape dim x dim, unnormalized)."""
    cdef Py_ssize_t M = X.shape[0]
    cdef int dim = X.shape[1]
    cdef Py_ssize_t D = out.shape[0]
    cdef long long qL = p ** L
    cdef long long qm = p ** m
    cdef long long inv2 = (qL + 1) // 2
    cdef _Scratch s = _Scratch(D, dim)
    cdef Py_ssize_t i, h
    cdef int j
    cdef double complex fx, v
    with nogil:
        for i in range(M):
            fx = f[i]
            if fx == 0:
                continue
            for j in range(dim):
                s.x[j] = pmod(X[i, j], qL)
            fill(kind, d, dim, qL, qm, inv2, &a[0], s.x, D, s.col, s.ph, s.digits)
            for h in range(D):
                v = roots[s.ph[h]]
                out[s.col[h], h] = out[s.col[h], h] + fx * v.conjugate()


def inverse_block(int kind, int d, long long p, int m, int L,
                  const long long[::1] a, const long long[:, ::1] X,
                  const double complex[:, ::1] sigma, const double complex[::1] roots,
                  double scale, double complex[::1] out):
    """Add scale * Tr[pi(x) sigma] to out[x] for every grid point."""
    cdef Py_ssize_t M = X.shape[0]
    cdef int dim = X.shape[1]
    cdef Py_ssize_t D = sigma.shape[0]
    cdef long long qL = p ** L
    cdef long long qm = p ** m
    cdef long long inv2 = (qL + 1) // 2
    cdef _Scratch s = _Scratch(D, dim)
    cdef Py_ssize_t i, h
    cdef int j
    cdef double complex acc
    with nogil:
        for i in range(M):
            for j in range(dim):
                s.x[j] = pmod(X[i, j], qL)
            fill(kind, d, dim, qL, qm, inv2, &a[0], s.x, D, s.col, s.ph, s.digits)
            acc = 0
            for h in range(D):
                acc = acc + roots[s.ph[h]] * sigma[s.col[h], h]
            out[i] = out[i] + scale * acc


def eigen_one_counts(int kind, int d, long long p, int m, int L,
                     const long long[::1] a, const long long[:, ::1] X,
                     long long[::1] out, long long[::1] seen,
                     long long[::1] nxt, long long[::1] phs):
    """Multiplicity of the eigenvalue 1 of pi(x) for every grid point.

    pi(x) is monomial: a permutation of the basis with a root of unity on each
    nonzero.  Every cycle whose phases sum to 0 mod p^L contributes exactly
    one eigenvalue 1.  ``seen``, ``nxt`` and ``phs`` are scratch buffers of
    length dim; ``seen`` must start at zero.
    """
    cdef Py_ssize_t M = X.shape[0]
    cdef int dim = X.shape[1]
    cdef Py_ssize_t D = nxt.shape[0]
    cdef long long qL = p ** L
    cdef long long qm = p ** m
    cdef long long inv2 = (qL + 1) // 2
    cdef _Scratch s = _Scratch(D, dim)
    cdef long long acc, stamp, cnt
    cdef Py_ssize_t i, c, h, jj
    cdef int j
    with nogil:
        for i in range(M):
            for j in range(dim):
                s.x[j] = pmod(X[i, j], qL)
            fill(kind, d, dim, qL, qm, inv2, &a[0], s.x, D, s.col, s.ph, s.digits)
            for h in range(D):
                nxt[s.col[h]] = h
                phs[s.col[h]] = s.ph[h]
            stamp = i + 1
            cnt = 0
            for c in range(D):
                if seen[c] == stamp:
                    continue
                acc = 0
                jj = c
                while seen[jj] != stamp:
                    seen[jj] = stamp
                    acc = addmod(acc, phs[jj], qL)
                    jj = nxt[jj]
                if acc == 0:
                    cnt += 1
            out[i] = cnt


def sparse_table(int kind, int d, long long p, int m, int L,
                 const long long[::1] a, const long long[:, ::1] X,
                 long long[:, ::1] rows, long long[:, ::1] phases):
    """Row index and integer phase of the nonzero in every column of pi(x), for every row x of X."""
    cdef Py_ssize_t M = X.shape[0]
    cdef int dim = X.shape[1]
    cdef Py_ssize_t D = rows.shape[1]
    cdef long long qL = p ** L
    cdef long long qm = p ** m
    cdef long long inv2 = (qL + 1) // 2
    cdef _Scratch s = _Scratch(D, dim)
    cdef Py_ssize_t i, h
    cdef int j
    with nogil:
        for i in range(M):
            for j in range(dim):
                s.x[j] = pmod(X[i, j], qL)
            fill(kind, d, dim, qL, qm, inv2, &a[0], s.x, D, s.col, s.ph, s.digits)
            for h in range(D):
                rows[i, s.col[h]] = h
                phases[i, s.col[h]] = s.ph[h]


def homomorphism_residual_packed(const int[:, ::1] code, const long long[::1] offsets,
                                 const long long[::1] moduli, int shift,
                                 const long long[::1] ia, const long long[:, ::1] ib,
                                 const long long[:, ::1] prod):
    """max over pairs and irreps of the largest entry of |pi(x) pi(y) - pi(xy)|.

    ``code[x, c]`` packs the nonzero of column c of pi(x) as
    (row << shift) | phase, with rows relative to the irrep block and
    2 * moduli[j] <= 2**shift so that adding two phases never carries into
    the row bits.  Irrep j owns the columns offsets[j] .. offsets[j+1] - 1.

    Pairs are (ia[i], ib[i, k]) and prod[i, k] is the grid row of their
    product.  The irrep loop sits outside the pair loop so that one irrep's
    table stays in cache.

    Column c of pi(x) pi(y) is column row(y, c) of pi(x) scaled by the phase
    of pi(y) in column c.  It matches pi(xy) iff the packed sum equals the
    packed entry of xy, possibly up to one wrap of the phase.  Returns the
    largest phase discrepancy |e(a/q) - e(b/q)|, or 1 when a row differs.
    """
    cdef Py_ssize_t B = prod.shape[0]
    cdef Py_ssize_t K = prod.shape[1]
    cdef Py_ssize_t J = moduli.shape[0]
    cdef Py_ssize_t i, j, k, c, o, oe, x, y, xy
    cdef int q, cy, packed, target, mask = (1 << shift) - 1
    cdef long long a, b
    cdef double worst = 0.0, e
    with nogil:
        for j in range(J):
            o = offsets[j]
            oe = offsets[j + 1]
            q = <int>moduli[j]
            for i in range(B):
                x = ia[i]
                for k in range(K):
                    y = ib[i, k]
                    xy = prod[i, k]
                    for c in range(o, oe):
                        cy = code[y, c]
                        packed = code[x, (cy >> shift) + o] + (cy & mask)
                        target = code[xy, c]
                        if packed == target or packed == target + q:
                            continue
                        if (packed >> shift) != (target >> shift):
                            if worst < 1.0:
                                worst = 1.0
                            continue
                        a = (packed & mask) % q
                        b = target & mask
                        e = 2.0 * abs(sin(M_PI * (a - b) / q))
                        if e > worst:
                            worst = e
    return worst
