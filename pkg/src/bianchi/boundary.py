"""Boundary map onto cusp classes and the cuspidal subspace.

A symbol [P, (u, v)] has boundary supported on two cusp classes read off
from the pair itself: the class with data (a, c) = (v^-1 mod gcd(u, nu), u)
weighted by P(1, 0), minus the class of (-u^-1 mod gcd(v, nu), v) weighted
by P(0, 1).  Class data is (c mod nu, a mod gcd(c, nu)) with both entries
identified under unit scalings, which twist weight-k coefficients by
lambda^(2-k); a class fixed by a scaling with nontrivial twist vanishes.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .linalg import SparseMat, Subspace, kernel, vec_axpy
from .quadints import QuadInt, gcd, inverse_mod, reduce_mod, xgcd
from .symbols import SymbolSpace, lift_to_sl2, normalize_cusp, point_cusp_orbits

def cusp_class(space: SymbolSpace, a: QuadInt, c: QuadInt):
    """Canonical class key for the cusp vector data (a, c), with the unit
    twist carrying a coefficient onto it; (None, 0) for a vanishing class.

    a only matters mod gcd(c, nu), and c mod nu.
    """
    fld = space.field
    nu = space.level
    k = space.weight
    best = None
    for lam in fld.units:
        c1 = reduce_mod(lam * c, nu)
        if best is None or c1.sort_key() < best[0].sort_key():
            best = (c1, lam)
    c0, lam0 = best
    m = gcd(c0, nu)
    a1 = lam0 * a
    best2 = None
    for dlt in fld.units:
        r1 = reduce_mod(dlt * a1, m)
        if best2 is None or r1.sort_key() < best2[0].sort_key():
            best2 = (r1, dlt)
    r0, dlt0 = best2
    for lam in fld.units:
        if reduce_mod(lam * c0, nu) != c0:
            continue
        for dlt in fld.units:
            if reduce_mod(dlt * lam * r0, m) == r0 and (lam * dlt) ** (k - 2) != fld.one:
                return None, fld.zero
    # [v] = (lam0 * dlt0)^(k-2) [v0] under the scaling identification
    return (c0, r0), (lam0 * dlt0) ** (k - 2)

def boundary_of_gen(space: SymbolSpace, gen: int) -> dict:
    """Boundary of one generator, as a vector over (class key, part)."""
    fld = space.field
    nu = space.level
    npts = len(space.points)
    if space.weight == 2:
        u, v = space.points[gen]
        c_inf = c_zero = fld.one  # P(1,0) and P(0,1) for P = 1
    else:
        comp, pt = divmod(gen, npts)
        mono, part = divmod(comp, 2)
        u, v = space.points[pt]
        c = fld.one if part == 0 else fld.omega
        deg = space.weight - 2
        c_inf = c if mono == deg else fld.zero
        c_zero = c if mono == 0 else fld.zero
    out: dict = {}
    for coeff, sign, a_raw, c_raw in (
        (c_inf, 1, None, u),
        (c_zero, -1, None, v),
    ):
        if coeff.is_zero():
            continue
        m = gcd(c_raw, nu)
        if sign == 1:
            a_raw = inverse_mod(v, m)
        else:
            a_raw = reduce_mod(-inverse_mod(u, m), m)
        key, tw = cusp_class(space, a_raw, c_raw)
        if key is None:
            continue
        total = coeff * tw
        if total.a:
            vec_axpy(out, Fraction(sign * total.a), {(key, 0): Fraction(1)})
        if total.b:
            vec_axpy(out, Fraction(sign * total.b), {(key, 1): Fraction(1)})
    return out

def cusp_label(space: SymbolSpace, p: QuadInt, q: QuadInt):
    """Boundary class key of the cusp (p : q); None when the class is dead.

    Weight 2 only: for higher weights the projective label is defined only
    up to a unit twist.
    """
    assert space.weight == 2
    p, q = normalize_cusp(p, q)
    key, _ = cusp_class(space, p, q)
    return key

@lru_cache(maxsize=None)
def boundary_matrix(space: SymbolSpace) -> tuple[tuple, SparseMat]:
    """Label list and the boundary matrix on the quotient basis."""
    cols = [boundary_of_gen(space, g) for g in space.free_gens]
    keys = sorted(
        {k for col in cols for k in col},
        key=lambda k: (k[0][0].sort_key(), k[0][1].sort_key(), k[1]),
    )
    kidx = {k: i for i, k in enumerate(keys)}
    mat = SparseMat(len(keys), space.dim)
    for j, col in enumerate(cols):
        for k, val in col.items():
            mat.add_to(kidx[k], j, val)
    return tuple(keys), mat

@lru_cache(maxsize=None)
def cuspidal_subspace(space: SymbolSpace) -> Subspace:
    """Kernel of the boundary map, inside the quotient space."""
    _, mat = boundary_matrix(space)
    return Subspace(space.dim, kernel(mat))

def orbit_of_cusp(space: SymbolSpace, orbit_ids, p: QuadInt, q: QuadInt) -> int:
    """Cusp orbit containing (p : q), located through a matrix with that
    first column."""
    p, q = normalize_cusp(p, q)
    g, s, _ = xgcd(p, q)
    assert g.is_unit()
    pt = space.point_of(q, s * g.conj())
    assert pt is not None
    return orbit_ids[pt]

@lru_cache(maxsize=None)
def true_boundary_matrix(space: SymbolSpace) -> SparseMat:
    """Boundary straight to cusp orbits (no labels); weight 2 only."""
    assert space.weight == 2
    ids = point_cusp_orbits(space)
    ncusps = max(ids) + 1
    mat = SparseMat(ncusps, space.dim)
    for j, gen in enumerate(space.free_gens):
        u, v = space.points[gen]
        g = lift_to_sl2(space.field, space.level, u, v)
        mat.add_to(orbit_of_cusp(space, ids, g.a, g.c), j, Fraction(1))
        mat.add_to(orbit_of_cusp(space, ids, g.b, g.d), j, Fraction(-1))
    return mat
