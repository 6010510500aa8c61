# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled versions of the kernels in ``_kernels_py``.

Same algorithms, same enumeration orders and same floating-point evaluation
order, over C integers.  Entries must stay below 2**31 in magnitude; an
``OverflowError`` tells the dispatcher to retry in pure Python.
"""
from libc.math cimport log
from libc.stdlib cimport llabs
from libcpp.vector cimport vector
from libcpp.pair cimport pair
from libcpp.algorithm cimport next_permutation

ctypedef long long i64
ctypedef pair[int, i64] entry
ctypedef vector[entry] srow

cdef i64 LIMIT = 2147483648  # 2**31


cdef inline i64 _gcd(i64 a, i64 b) nogil:
    a = llabs(a)
    b = llabs(b)
    while b:
        a, b = b, a % b
    return a


cdef bint _normalise(srow& row, bint positive_lead) nogil:
    """Divide by the content; returns False on overflow of the entry bound."""
    cdef i64 g = 0
    cdef size_t k
    for k in range(row.size()):
        g = _gcd(g, row[k].second)
        if g == 1:
            break
    if positive_lead and row[row.size() - 1].second < 0:
        g = -g
    if g != 1 and g != 0:
        for k in range(row.size()):
            row[k].second = row[k].second // g
    for k in range(row.size()):
        if llabs(row[k].second) >= LIMIT:
            return False
    return True


def sparse_rank(rows, int ncols):
    """Exact rank of an integer matrix given as ``{col: value}`` rows."""
    cdef vector[srow] pivots
    cdef vector[bint] has_pivot
    pivots.resize(ncols)
    has_pivot.resize(ncols, False)
    cdef srow row, merged
    cdef int rank = 0
    cdef int lead
    cdef i64 a, b, g, ma, mb, w
    cdef size_t i, j
    for source in rows:
        row.clear()
        for c in sorted(source):
            v = source[c]
            if v:
                if not (-LIMIT < v < LIMIT):
                    raise OverflowError("entry exceeds compiled kernel range")
                row.push_back(entry(<int>c, <i64>v))
        with nogil:
            while row.size() > 0:
                lead = row[row.size() - 1].first
                if not has_pivot[lead]:
                    if not _normalise(row, True):
                        with gil:
                            raise OverflowError("pivot row exceeds compiled kernel range")
                    pivots[lead] = row
                    has_pivot[lead] = True
                    rank += 1
                    break
                a = pivots[lead][pivots[lead].size() - 1].second
                b = row[row.size() - 1].second
                g = _gcd(a, b)
                ma = a // g
                mb = b // g
                merged.clear()
                i = 0
                j = 0
                while i < row.size() or j < pivots[lead].size():
                    if j == pivots[lead].size() or (i < row.size() and row[i].first < pivots[lead][j].first):
                        w = ma * row[i].second
                        if w:
                            merged.push_back(entry(row[i].first, w))
                        i += 1
                    elif i == row.size() or pivots[lead][j].first < row[i].first:
                        w = -mb * pivots[lead][j].second
                        if w:
                            merged.push_back(entry(pivots[lead][j].first, w))
                        j += 1
                    else:
                        w = ma * row[i].second - mb * pivots[lead][j].second
                        if w:
                            merged.push_back(entry(row[i].first, w))
                        i += 1
                        j += 1
                row.swap(merged)
                if row.size() > 0 and not _normalise(row, False):
                    with gil:
                        raise OverflowError("row exceeds compiled kernel range")
    return rank


# ---------------------------------------------------------------------------
# Gromov-Hausdorff correspondence search

cdef class _CorrSearch:
    cdef int nx, ny
    cdef i64 threshold
    cdef vector[vector[i64]] dx, dy
    cdef vector[int] cx, cy
    cdef vector[bint] covered

    def __init__(self, DX, DY, i64 threshold):
        self.nx = len(DX)
        self.ny = len(DY)
        self.threshold = threshold
        self.dx.resize(self.nx)
        self.dy.resize(self.ny)
        for i in range(self.nx):
            for j in range(self.nx):
                self.dx[i].push_back(DX[i][j])
        for i in range(self.ny):
            for j in range(self.ny):
                self.dy[i].push_back(DY[i][j])
        self.covered.resize(self.ny, False)

    cdef bint ok(self, int x, int y) nogil:
        cdef size_t k
        cdef i64 diff
        for k in range(self.cx.size()):
            diff = self.dx[x][self.cx[k]] - self.dy[y][self.cy[k]]
            if llabs(diff) > self.threshold:
                return False
        return True

    cdef bint cover_y(self, int j) nogil:
        cdef int x
        while j < self.ny and self.covered[j]:
            j += 1
        if j == self.ny:
            return True
        for x in range(self.nx):
            if self.ok(x, j):
                self.cx.push_back(x)
                self.cy.push_back(j)
                self.covered[j] = True
                if self.cover_y(j + 1):
                    return True
                self.covered[j] = False
                self.cx.pop_back()
                self.cy.pop_back()
        return False

    cdef bint assign_x(self, int i) nogil:
        cdef int y
        cdef bint was
        cdef vector[bint] saved
        if i == self.nx:
            saved = self.covered
            if self.cover_y(0):
                return True
            self.covered = saved
            return False
        for y in range(self.ny):
            if self.ok(i, y):
                self.cx.push_back(i)
                self.cy.push_back(y)
                was = self.covered[y]
                self.covered[y] = True
                if self.assign_x(i + 1):
                    return True
                self.covered[y] = was
                self.cx.pop_back()
                self.cy.pop_back()
        return False

    def run(self):
        cdef bint found
        with nogil:
            found = self.assign_x(0)
        if not found:
            return None
        return sorted(set((self.cx[k], self.cy[k]) for k in range(self.cx.size())))


def correspondence_search(DX, DY, threshold):
    return _CorrSearch(DX, DY, threshold).run()


# ---------------------------------------------------------------------------
# Lipschitz distances

cdef void _dil(const vector[vector[i64]]& src, const vector[vector[i64]]& tgt,
               const int* f, int n, i64* num, i64* den) nogil:
    cdef int a, b
    cdef i64 t, s
    num[0] = 0
    den[0] = 1
    for a in range(n):
        for b in range(a + 1, n):
            t = tgt[f[a]][f[b]]
            s = src[a][b]
            if t * den[0] > num[0] * s:
                num[0] = t
                den[0] = s


cdef inline double _log_term(i64 num, i64 den) nogil:
    if num > den:
        return log(<double>num / <double>den)
    return 0.0


cdef vector[vector[i64]] _to_vec(D):
    cdef vector[vector[i64]] out
    out.resize(len(D))
    for i in range(len(D)):
        for j in range(len(D)):
            out[i].push_back(D[i][j])
    return out


cdef void _decode(i64 code, int base, int n, int* out) nogil:
    cdef int k
    for k in range(n - 1, -1, -1):
        out[k] = code % base
        code //= base


def best_map_pair(DX, DY, i64 scale):
    cdef vector[vector[i64]] dx = _to_vec(DX)
    cdef vector[vector[i64]] dy = _to_vec(DY)
    cdef int nx = len(DX)
    cdef int ny = len(DY)
    cdef i64 nphi = 1, npsi = 1
    cdef int k
    for k in range(nx):
        nphi *= ny
    for k in range(ny):
        npsi *= nx
    cdef vector[int] phis, psis
    phis.resize(nphi * nx)
    psis.resize(npsi * ny)
    cdef vector[double] lphi, lpsi
    lphi.resize(nphi)
    lpsi.resize(npsi)
    cdef i64 i, j, num, den, dxm, dym, v
    cdef double val, best = 1e308
    cdef i64 bi = 0, bj = 0
    cdef int x, y
    cdef double dscale = <double>scale
    with nogil:
        for i in range(nphi):
            _decode(i, ny, nx, &phis[i * nx])
            _dil(dx, dy, &phis[i * nx], nx, &num, &den)
            lphi[i] = _log_term(num, den)
        for j in range(npsi):
            _decode(j, nx, ny, &psis[j * ny])
            _dil(dy, dx, &psis[j * ny], ny, &num, &den)
            lpsi[j] = _log_term(num, den)
        for i in range(nphi):
            for j in range(npsi):
                dxm = 0
                for x in range(nx):
                    v = dx[psis[j * ny + phis[i * nx + x]]][x]
                    if v > dxm:
                        dxm = v
                dym = 0
                for y in range(ny):
                    v = dy[phis[i * nx + psis[j * ny + y]]][y]
                    if v > dym:
                        dym = v
                val = (lphi[i] + lpsi[j]) + <double>(dxm + dym) / dscale
                if val < best:
                    best = val
                    bi = i
                    bj = j
    phi = tuple(phis[bi * nx + k] for k in range(nx))
    psi = tuple(psis[bj * ny + k] for k in range(ny))
    return best, phi, psi


def best_bijection(DX, DY):
    cdef vector[vector[i64]] dx = _to_vec(DX)
    cdef vector[vector[i64]] dy = _to_vec(DY)
    cdef int n = len(DX)
    cdef vector[int] f, inv, arg
    f.resize(n)
    inv.resize(n)
    cdef int k
    for k in range(n):
        f[k] = k
    arg = f
    cdef double val, best = 1e308
    cdef i64 num, den
    with nogil:
        while True:
            for k in range(n):
                inv[f[k]] = k
            _dil(dx, dy, &f[0], n, &num, &den)
            val = _log_term(num, den)
            _dil(dy, dx, &inv[0], n, &num, &den)
            val = val + _log_term(num, den)
            if val < best:
                best = val
                arg = f
            if not next_permutation(f.begin(), f.end()):
                break
    return best, tuple(arg[k] for k in range(n))
