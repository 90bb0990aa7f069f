"""Exact Gaussian elimination over a coefficient field.

Rows are sparse dicts mapping variable index to a nonzero raw value.
Pivots always sit on the smallest variable present, so the reduced
echelon form, the pivot set and the nullspace basis depend only on the
row space and the variable order, never on the order rows arrive in.
"""

from __future__ import annotations


def rref(rows, ring) -> dict[int, dict]:
    """Reduce an iterable of sparse rows; returns {pivot var: row}.

    Every returned row has coefficient one at its pivot and support only
    on its pivot and on free variables.
    """
    pivot_rows: dict[int, dict] = {}
    zero = ring.zero
    for incoming in rows:
        row = dict(incoming)
        while row:
            lead = min(row)
            piv = pivot_rows.get(lead)
            if piv is None:
                inv = ring.inv(row[lead])
                pivot_rows[lead] = {c: ring.mul(v, inv) for c, v in row.items()}
                break
            factor = row.pop(lead)
            for c, v in piv.items():
                if c == lead:
                    continue
                nv = ring.sub(row.get(c, zero), ring.mul(factor, v))
                if nv == zero:
                    row.pop(c, None)
                else:
                    row[c] = nv
    # Back substitution: clear pivot columns out of earlier pivot rows.
    for lead in sorted(pivot_rows, reverse=True):
        row = pivot_rows[lead]
        for c in sorted(c for c in row if c != lead and c in pivot_rows):
            factor = row.pop(c)
            for c2, v2 in pivot_rows[c].items():
                if c2 == c:
                    continue
                nv = ring.sub(row.get(c2, zero), ring.mul(factor, v2))
                if nv == zero:
                    row.pop(c2, None)
                else:
                    row[c2] = nv
    return pivot_rows


def nullspace(pivot_rows: dict[int, dict], nvars: int, ring) -> list[list]:
    """Canonical nullspace basis, one dense vector per free variable."""
    basis = []
    zero = ring.zero
    one = ring.one
    for free in range(nvars):
        if free in pivot_rows:
            continue
        vec = [zero] * nvars
        vec[free] = one
        for lead, row in pivot_rows.items():
            coeff = row.get(free)
            if coeff is not None and coeff != zero:
                vec[lead] = ring.neg(coeff)
        basis.append(vec)
    return basis


def reduce_vector(vec: dict, pivot_rows: dict[int, dict], ring) -> dict:
    """Residual of a sparse vector against an rref basis; empty iff in span."""
    zero = ring.zero
    row = {c: v for c, v in vec.items() if v != zero}
    for lead in sorted(pivot_rows):
        factor = row.get(lead)
        if factor is None or factor == zero:
            continue
        for c, v in pivot_rows[lead].items():
            nv = ring.sub(row.get(c, zero), ring.mul(factor, v))
            if nv == zero:
                row.pop(c, None)
            else:
                row[c] = nv
    return row


def solve(rows: list[list], rhs: list, ring):
    """One exact solution of A x = b, or None if inconsistent.

    Dense elimination with deterministic first-nonzero pivoting; free
    variables are set to zero, so the solution is canonical.
    """
    zero = ring.zero
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    aug = [list(rows[i]) + [rhs[i]] for i in range(m)]
    pivot_of_col = {}
    rank = 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, m):
            if aug[i][col] != zero:
                pivot = i
                break
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        inv = ring.inv(aug[rank][col])
        aug[rank] = [ring.mul(v, inv) for v in aug[rank]]
        prow = aug[rank]
        for i in range(m):
            if i == rank:
                continue
            factor = aug[i][col]
            if factor == zero:
                continue
            arow = aug[i]
            for j in range(col, ncols + 1):
                if prow[j] != zero:
                    arow[j] = ring.sub(arow[j], ring.mul(factor, prow[j]))
        pivot_of_col[col] = rank
        rank += 1
    for i in range(rank, m):
        if aug[i][ncols] != zero:
            return None
    solution = [zero] * ncols
    for col, i in pivot_of_col.items():
        solution[col] = aug[i][ncols]
    return solution
