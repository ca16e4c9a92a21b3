import random
from fractions import Fraction

import pytest

from bianchi.boundary import cuspidal_subspace
from bianchi.hecke import (
    commute_check,
    coset_count,
    coset_representatives,
    coset_reps_bruteforce,
    eigensystems,
    hecke_matrix,
    hecke_on_manin,
    hecke_oracle,
    heilbronn_action,
    same_coset,
)
from bianchi.linalg import SparseMat, vec_dot, vec_scale
from bianchi.quadints import (
    Field,
    canonical_elements_of_norm,
    divides,
    gcd,
    parse_element,
    reduce_mod,
)
from bianchi.symbols import Mat2, lift_to_sl2, symbol_space
from test_symbols import spaces

ORACLE_CASES = [
    (1, "3", "1+1w"),
    (1, "2+1w", "1+1w"),
    (1, "3", "2"),
    (2, "1+1w", "w"),
    (3, "2", "1+1w"),
    (7, "w", "1+1w"),
    (11, "2", "w"),
]


def first_etas(fld, nu, count, bound=40):
    out = []
    for n in range(2, bound):
        for e in canonical_elements_of_norm(fld, n):
            if gcd(e, nu).is_unit():
                out.append(e)
                if len(out) == count:
                    return out
    raise AssertionError("not enough coprime etas below the bound")


def test_unit_eta_is_identity():
    for d, nt in [(1, "3"), (11, "w")]:
        fld = Field.get(d)
        sp = symbol_space(fld, parse_element(fld, nt))
        assert hecke_matrix(sp, fld.one) == SparseMat.identity(sp.dim)


def test_coprimality_enforced():
    fld = Field.get(1)
    sp = symbol_space(fld, parse_element(fld, "1+1w"))
    with pytest.raises(ValueError):
        hecke_matrix(sp, fld.from_int(2))
    with pytest.raises(ValueError):
        hecke_matrix(sp, fld.zero)
    # the bare family action carries no coprimality requirement
    assert heilbronn_action(sp, fld.from_int(2)).nrows == sp.dim


def test_production_equals_oracle():
    for d, nt, et in ORACLE_CASES:
        fld = Field.get(d)
        nu, eta = parse_element(fld, nt), parse_element(fld, et)
        sp = symbol_space(fld, nu)
        prod = hecke_on_manin(sp, eta)
        orac = hecke_oracle(sp, eta)
        assert prod.matrix == orac.matrix, (d, nt, et)
        assert prod.cuspidal_matrix == orac.cuspidal_matrix


def test_production_equals_oracle_weight4():
    fld = Field.get(3)
    sp = symbol_space(fld, fld.from_int(2), 4)
    eta = parse_element(fld, "1+1w")
    assert sp.dim > 0
    assert hecke_on_manin(sp, eta).matrix == hecke_oracle(sp, eta).matrix


def test_coset_representatives_match_bruteforce():
    for d, nt, et in ORACLE_CASES[:4]:
        fld = Field.get(d)
        nu, eta = parse_element(fld, nt), parse_element(fld, et)
        built = coset_representatives(fld, nu, eta)
        found = coset_reps_bruteforce(fld, nu, eta)
        assert len(built) == len(found) == coset_count(eta)
        for r in built:
            assert sum(1 for s in found if same_coset(s, r, nu, eta)) == 1
        # pairwise inequivalent (injectivity half of the coset matching)
        for i, r in enumerate(built):
            for s in built[i + 1:]:
                assert not same_coset(r, s, nu, eta)


def test_bruteforce_budget_error():
    fld = Field.get(1)
    with pytest.raises(RuntimeError):
        coset_reps_bruteforce(fld, parse_element(fld, "3"), parse_element(fld, "1+1w"), budget=0)


def random_sl2(fld, rng, length=5):
    s = Mat2(fld.zero, -fld.one, fld.one, fld.zero)
    gens = [s,
            Mat2(fld.one, fld.one, fld.zero, fld.one),
            Mat2(fld.one, -fld.one, fld.zero, fld.one),
            Mat2(fld.one, fld.omega, fld.zero, fld.one),
            Mat2(fld.one, -fld.omega, fld.zero, fld.one)]
    m = Mat2.identity(fld)
    for _ in range(rng.randrange(1, length + 1)):
        m = m * rng.choice(gens)
    return m


def test_section_pair_properties():
    # sample check of the compatibility properties between the coset section
    # phi (lift of the bottom row) and the congruence matrices of det eta
    rng = random.Random(11)
    for d, nt, et in [(1, "3", "1+1w"), (2, "1+1w", "w")]:
        fld = Field.get(d)
        nu, eta = parse_element(fld, nt), parse_element(fld, et)
        sp = symbol_space(fld, nu)
        reps = coset_representatives(fld, nu, eta)

        def phi(mat):
            u, v = reduce_mod(mat.c, nu), reduce_mod(mat.d, nu)
            return lift_to_sl2(fld, nu, u, v)

        for delta in reps:
            for _ in range(4):
                gamma = delta.adj() * random_sl2(fld, rng)
                g = random_sl2(fld, rng)
                # (1) phi(gamma * g) and phi(gamma) * g share a coset
                assert same_coset(phi(gamma) * g, phi(gamma * g), nu, fld.one)
                # (2) phi(gamma) * adj(gamma) lands in the congruence set
                m = phi(gamma) * gamma.adj()
                assert m.det() == eta
                assert divides(nu, m.c) and divides(nu, m.a - fld.one)


def test_commutativity():
    for space in spaces():
        fld, nu = space.field, space.level
        etas = first_etas(fld, nu, 3)
        ops = [hecke_on_manin(space, e) for e in etas]
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                assert commute_check(ops[i], ops[j])


def test_commute_check_rejects_space_mismatch():
    fld = Field.get(1)
    sp1 = symbol_space(fld, parse_element(fld, "3"))
    sp2 = symbol_space(fld, parse_element(fld, "2+1w"))
    eta = parse_element(fld, "1+1w")
    with pytest.raises(ValueError):
        commute_check(hecke_on_manin(sp1, eta), hecke_on_manin(sp2, eta))


def test_tie_break_invariance_on_quotient():
    for d, nt, et in ORACLE_CASES[:5]:
        fld = Field.get(d)
        nu, eta = parse_element(fld, nt), parse_element(fld, et)
        sp = symbol_space(fld, nu)
        assert hecke_matrix(sp, eta, "low") == hecke_matrix(sp, eta, "high")


def test_associate_etas_give_equal_operators():
    # observed relation: the quotient matrix only depends on eta up to units
    for d, nt in [(1, "3"), (3, "2"), (11, "2")]:
        fld = Field.get(d)
        sp = symbol_space(fld, parse_element(fld, nt))
        eta = first_etas(fld, sp.level, 1)[0]
        base = hecke_matrix(sp, eta)
        for u in fld.units:
            assert hecke_matrix(sp, u * eta) == base


def test_cuspidal_columns_contained():
    fld = Field.get(11)
    sp = symbol_space(fld, parse_element(fld, "1-2w"))
    cusp = cuspidal_subspace(sp)
    mat = hecke_matrix(sp, parse_element(fld, "2"))
    for b in cusp.basis:
        assert cusp.contains(mat.matvec(b))


def test_eigensystems_empty_without_cusp_forms():
    fld = Field.get(1)
    sp = symbol_space(fld, parse_element(fld, "3"))
    tab = eigensystems(sp, first_etas(fld, sp.level, 2))
    assert tab.systems == [] and tab.residual_factors == []


def test_eigensystems_rejects_bad_eta():
    fld = Field.get(11)
    sp = symbol_space(fld, parse_element(fld, "1-2w"))
    with pytest.raises(ValueError):
        eigensystems(sp, [sp.level])


def test_first_rational_eigensystem():
    # smallest level in any of the five fields with a cuspidal class: d = 11,
    # nu = 1 - 2w of norm 11, one-dimensional cuspidal space
    fld = Field.get(11)
    sp = symbol_space(fld, parse_element(fld, "1-2w"))
    assert cuspidal_subspace(sp).dim == 1
    etas = first_etas(fld, sp.level, 8)
    tab = eigensystems(sp, etas)
    assert len(tab.systems) == 1 and not tab.residual_factors
    s = tab.systems[0]
    assert s.label == "a" and s.dim == 1
    expected = {"w": -1, "1-w": -1, "2": 0, "1+w": 1, "2-w": 1,
                "2+w": -2, "3-w": -2, "3": 1}
    assert {str(k): v for k, v in s.eigenvalues.items()} == expected
    v, phi = s.vector, s.functional
    assert vec_dot(phi, v) == 1
    for eta, a in s.eigenvalues.items():
        mat = hecke_matrix(sp, eta)
        assert mat.matvec(v) == vec_scale(v, a)
        assert mat.vecmat(phi) == vec_scale(phi, a)


def test_eigenvalue_multiplicativity_on_split_prime():
    # 3 = w * (1 - w) up to a unit in the d = 11 integers; the eigenvalue at
    # 3 must be the product of the eigenvalues at the two prime factors
    fld = Field.get(11)
    sp = symbol_space(fld, parse_element(fld, "1-2w"))
    w, wb, three = (parse_element(fld, t) for t in ("w", "1-w", "3"))
    tab = eigensystems(sp, [w, wb, three])
    s = tab.systems[0]
    assert s.eigenvalues[three] == s.eigenvalues[w] * s.eigenvalues[wb]


def test_oldform_block_at_composite_level():
    # nu = w * (1 - 2w) (norm 33): the norm-11 system reappears with
    # multiplicity two and the same eigenvalues
    fld = Field.get(11)
    new = symbol_space(fld, parse_element(fld, "1-2w"))
    old = symbol_space(fld, parse_element(fld, "6-w"))
    etas = first_etas(fld, fld.from_int(33), 3, bound=12)
    t_new = eigensystems(new, etas)
    t_old = eigensystems(old, etas)
    assert len(t_old.systems) == 1
    s = t_old.systems[0]
    assert s.dim == 2
    assert s.vector is None and s.functional is None
    assert s.eigenvalues == t_new.systems[0].eigenvalues


def test_irrational_residuals_reported():
    fld = Field.get(7)
    sp = symbol_space(fld, fld.from_int(5))
    assert cuspidal_subspace(sp).dim == 2
    tab = eigensystems(sp, [parse_element(fld, "w")])
    assert tab.systems == []
    assert [(str(e), r) for e, r in tab.residual_factors] == [("w", [2, 2, 1])]
