import random
from fractions import Fraction

import pytest

from bianchi.linalg import vec_add, vec_axpy, vec_sub
from bianchi.quadints import EUCLIDEAN_D, Field, gcd, parse_element, reduce_mod
from bianchi.symbols import (
    Mat2,
    SymbolSpace,
    continued_fraction_path,
    cusp_count,
    enumerate_points,
    lift_to_sl2,
    modular_symbol_vec,
    normalize_cusp,
    point_count_formula,
    relation_words,
    slash_poly,
    symbol_space,
)

FIELDS = [Field.get(d) for d in EUCLIDEAN_D]

# one small prime-ish and one composite-ish level per field
LEVELS = {
    1: ["1+1w", "3"],
    2: ["w", "1+1w"],
    3: ["2", "1+1w"],
    7: ["w", "1+1w"],
    11: ["w", "2"],
}


def spaces(weight=2):
    for d, texts in LEVELS.items():
        fld = Field.get(d)
        for s in texts:
            yield symbol_space(fld, parse_element(fld, s), weight)


def cusp_key(fld, p, q):
    return normalize_cusp(p, q)


def test_relation_words_close_up():
    # each word list must trace a closed cycle of unimodular edges
    for fld in FIELDS:
        words, J = relation_words(fld)
        assert J.det().is_unit()
        # J fixes the cusps 0 and oo
        assert cusp_key(fld, *J.act_cusp(fld.zero, fld.one)) == cusp_key(fld, fld.zero, fld.one)
        assert cusp_key(fld, *J.act_cusp(fld.one, fld.zero)) == cusp_key(fld, fld.one, fld.zero)
        for word in words:
            counts = {}
            for w in word:
                assert w.det().is_unit()
                start = cusp_key(fld, *w.act_cusp(fld.zero, fld.one))
                end = cusp_key(fld, *w.act_cusp(fld.one, fld.zero))
                counts[start] = counts.get(start, 0) - 1
                counts[end] = counts.get(end, 0) + 1
            assert all(v == 0 for v in counts.values()), (fld.d, counts)


def test_point_enumeration_matches_formula():
    for fld in FIELDS:
        for s in LEVELS[fld.d] + ["1"]:
            nu = parse_element(fld, s)
            pts = enumerate_points(fld, nu)
            assert len(set(pts)) == len(pts)
            assert len(pts) == point_count_formula(fld, nu)


def test_point_enumeration_matrix_oracle():
    # (u, v) is unimodular iff some (s, t) solves u*s + v*t = unit mod nu
    from bianchi.quadints import residues_mod

    for fld in FIELDS:
        nu = parse_element(fld, LEVELS[fld.d][0])
        reps = residues_mod(nu)
        expected = set()
        for u in reps:
            for v in reps:
                if any(
                    gcd(reduce_mod(u * s + v * t, nu), nu).is_unit()
                    for s in reps
                    for t in reps
                ):
                    expected.add((u, v))
        assert set(enumerate_points(fld, nu)) == expected


def test_gaussian_prime_level_pin():
    fld = Field.get(1)
    assert point_count_formula(fld, fld.from_int(2)) == 12
    pts = enumerate_points(fld, parse_element(fld, "1+1w"))
    assert len(pts) == 3


def test_lift_to_sl2():
    for space in spaces():
        fld, nu = space.field, space.level
        for u, v in space.points:
            g = lift_to_sl2(fld, nu, u, v)
            assert g.det() == fld.one
            assert reduce_mod(g.c, nu) == reduce_mod(u, nu)
            assert reduce_mod(g.d, nu) == reduce_mod(v, nu)


def test_lift_pins():
    fld = Field.get(1)
    nu = fld.from_int(3)
    eye = lift_to_sl2(fld, nu, fld.zero, fld.one)
    assert eye == Mat2.identity(fld)
    s = lift_to_sl2(fld, nu, fld.one, fld.zero)
    assert s == Mat2(fld.zero, -fld.one, fld.one, fld.zero)


def test_level_one_spaces_vanish():
    # no weight-2 forms at level (1) for any Euclidean field
    for fld in FIELDS:
        sp = symbol_space(fld, fld.one)
        assert sp.dim == 0


def test_relation_rows_vanish_in_quotient():
    for space in list(spaces()) + [symbol_space(Field.get(1), Field.get(1).from_int(2), 4)]:
        npts = len(space.points)
        if space.weight == 2:
            words, J = space.sum_words, space.J
            for i in range(npts):
                assert vec_sub(space.gen_map[space.act_point(i, J)], space.gen_map[i]) == {}
                for word in words:
                    total = {}
                    for w in word:
                        vec_axpy(total, Fraction(1), space.gen_map[space.act_point(i, w)])
                    assert total == {}, (space.field.d, str(space.level), i)
        else:
            fld = space.field
            rels = [[(w, 1) for w in word] for word in space.sum_words]
            rels.append([(Mat2.identity(fld), 1), (space.J, -1)])
            for rel in rels:
                for i in range(npts):
                    for mono in range(space.weight - 1):
                        for coeff in (fld.one, fld.omega):
                            total = {}
                            for w, sgn in rel:
                                poly = slash_poly({mono: coeff}, w.inv_unit(), space.weight)
                                vec_axpy(
                                    total,
                                    Fraction(sgn),
                                    space.poly_symbol_vector(poly, space.act_point(i, w)),
                                )
                            assert total == {}


def test_roundtrip_generators():
    # [1, g] must agree with the modular symbol from g*0 to g*oo
    for space in spaces():
        fld, nu = space.field, space.level
        for idx, (u, v) in enumerate(space.points):
            g = lift_to_sl2(fld, nu, u, v)
            got = modular_symbol_vec(space, (g.b, g.d), (g.a, g.c))
            assert got == space.gen_map[idx], (fld.d, str(nu), idx)


def test_weight4_roundtrip():
    fld = Field.get(1)
    space = symbol_space(fld, fld.from_int(2), 4)
    assert space.weight == 4
    npts = len(space.points)
    for idx, (u, v) in enumerate(space.points):
        g = lift_to_sl2(fld, space.level, u, v)
        for mono in range(3):
            for part, coeff in enumerate((fld.one, fld.omega)):
                poly = slash_poly({mono: coeff}, g, 4)
                got = modular_symbol_vec(space, (g.b, g.d), (g.a, g.c), poly)
                gen = (2 * mono + part) * npts + idx
                assert got == space.gen_map[gen]


def test_three_term_cocycle():
    rng = random.Random(7)
    for space in spaces():
        fld = space.field
        for _ in range(10):
            cusps = []
            while len(cusps) < 3:
                p = fld.elt(rng.randint(-9, 9), rng.randint(-9, 9))
                q = fld.elt(rng.randint(-9, 9), rng.randint(-9, 9))
                if not (p.is_zero() and q.is_zero()):
                    cusps.append((p, q))
            a, b, c = cusps
            total = vec_add(
                vec_add(modular_symbol_vec(space, a, b), modular_symbol_vec(space, b, c)),
                modular_symbol_vec(space, c, a),
            )
            assert total == {}


def test_path_pin_zero_to_infinity():
    # {0, oo} is the class of [1, (0, 1)], and the S-fold sends it to -[1, (1, 0)]
    fld = Field.get(1)
    space = symbol_space(fld, fld.from_int(3))
    vec = modular_symbol_vec(space, (fld.zero, fld.one), (fld.one, fld.zero))
    assert vec == space.gen_map[space.point_of(fld.zero, fld.one)]
    neg = {k: -v for k, v in space.gen_map[space.point_of(fld.one, fld.zero)].items()}
    assert vec == neg


def test_slash_composition():
    rng = random.Random(3)
    for fld in (Field.get(1), Field.get(3)):
        for weight in (4, 6):
            for _ in range(8):
                poly = {
                    i: fld.elt(rng.randint(-3, 3), rng.randint(-3, 3))
                    for i in range(weight - 1)
                }
                mats = []
                for _ in range(2):
                    # random unit determinant matrix from generators
                    m = Mat2.identity(fld)
                    for _ in range(4):
                        mu = fld.elt(rng.randint(-2, 2), rng.randint(-2, 2))
                        m = m * Mat2(fld.one, mu, fld.zero, fld.one)
                        if rng.random() < 0.5:
                            m = m * Mat2(fld.zero, -fld.one, fld.one, fld.zero)
                    mats.append(m)
                g, h = mats
                lhs = slash_poly(slash_poly(poly, g, weight), h, weight)
                rhs = slash_poly(poly, h * g, weight)
                assert lhs == rhs


def test_odd_weight_rejection():
    fld = Field.get(1)
    with pytest.raises(ValueError):
        SymbolSpace(fld, parse_element(fld, "1+1w"), 3)
    # fine when the level does not divide 2
    sp = SymbolSpace(fld, parse_element(fld, "2+1w"), 3)
    assert sp.weight == 3


def test_cusp_counts():
    for fld in FIELDS:
        assert cusp_count(symbol_space(fld, fld.one)) == 1
    fld = Field.get(1)
    assert cusp_count(symbol_space(fld, parse_element(fld, "1+1w"))) == 2


def test_continued_fraction_terminates_and_chains():
    rng = random.Random(11)
    for fld in FIELDS:
        for _ in range(25):
            p = fld.elt(rng.randint(-30, 30), rng.randint(-30, 30))
            q = fld.elt(rng.randint(-30, 30), rng.randint(-30, 30))
            if p.is_zero() and q.is_zero():
                continue
            mats = continued_fraction_path(fld, p, q)
            for m in mats:
                assert m.det().norm() == 1
            # consecutive cusp pairs chain from oo to p/q
            end = cusp_key(fld, p, q)
            prev = cusp_key(fld, fld.one, fld.zero)
            for m in mats:
                assert cusp_key(fld, *m.act_cusp(fld.zero, fld.one)) == prev
                prev = cusp_key(fld, *m.act_cusp(fld.one, fld.zero))
            assert prev == end


def test_normalize_cusp():
    fld = Field.get(1)
    w = fld.omega
    with pytest.raises(ValueError):
        normalize_cusp(fld.zero, fld.zero)
    p, q = normalize_cusp(fld.from_int(2) * w, fld.from_int(2))
    assert (p, q) == (w, fld.one)
    p, q = normalize_cusp(fld.from_int(5), fld.zero)
    assert (p, q) == (fld.one, fld.zero)
