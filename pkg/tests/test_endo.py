import pytest

from endochain.field import QQ, FieldSpec
from endochain.series import LaurentPoly, BranchVector
from endochain.curve_ring import build_ring, semigroup_ring, normalization_lattice
from endochain.chain import build_chain_tree, chain_family
from endochain.endo import (
    SimpleModule,
    build_endo_algebra,
    fcmt_check,
    global_dimension,
    minimal_projective_resolution,
    projective_gamma,
    projectivization_check,
    rad_projective_gamma,
    minimal_cover_syzygy,
)
from endochain.errors import (
    CharacteristicTooSmall,
    DuplicateSummand,
    MissingFreeSummand,
)


T = LaurentPoly.monomial(QQ, 1)
Z = LaurentPoly.zero(QQ)


def family_algebra(ring):
    tree = build_chain_tree(ring)
    fam = chain_family(tree)
    alg = build_endo_algebra(ring, fam.lattices(), fam.labels())
    return tree, alg


def test_gamma_blocks_cusp():
    r = semigroup_ring(QQ, [2, 3])
    _, alg = family_algebra(r)
    assert alg.k == 2
    # H(R -> E) = E, H(E -> R) = conductor t^2 F[[t]], End(E) = F[[t]]
    assert alg.hom[(0, 1)].hi == (0,)
    assert alg.hom[(1, 0)].lo == (2,) and alg.hom[(1, 0)].hi == (2,)
    assert alg.hom[(1, 1)].hi == (0,)


def test_radical_cusp_blocks():
    r = semigroup_ring(QQ, [2, 3])
    _, alg = family_algebra(r)
    # rad End(R) = m: positive-valuation part
    rad0 = alg.rad_diag[0]
    assert rad0.lo == (2,) and rad0.hi == (2,)
    rad1 = alg.rad_diag[1]
    assert rad1.lo == (1,) and rad1.hi == (1,)  # t F[[t]]


def test_radical_dvr():
    r = semigroup_ring(QQ, [1])
    _, alg = family_algebra(r)
    assert alg.rad_diag[0].lo == (1,)


def test_gldim_fixtures():
    for gens, expected in [([1], 1), ([2, 3], 2)]:
        r = semigroup_ring(QQ, gens)
        tree, alg = family_algebra(r)
        rep = global_dimension(alg, n=tree.n)
        assert rep.gldim == expected
        assert not rep.capped


def test_gldim_cusp_pd_multiset():
    # hand resolution: S at the free summand has pd 1 (rad P_R is a twist of
    # P_E), the other simple has pd 2
    r = semigroup_ring(QQ, [2, 3])
    tree, alg = family_algebra(r)
    rep = global_dimension(alg, n=tree.n)
    assert sorted(rep.pd_per_simple) == [1, 2]


def test_gldim_node():
    node = build_ring(QQ, 2, [BranchVector([T, Z]), BranchVector([Z, T])])
    tree, alg = family_algebra(node)
    rep = global_dimension(alg, n=tree.n)
    assert rep.gldim == 2 and rep.gldim <= tree.n + 1


def test_gldim_2_5_recorded_and_bounded():
    r = semigroup_ring(QQ, [2, 5])
    tree, alg = family_algebra(r)
    rep = global_dimension(alg, n=tree.n)
    assert rep.gldim == 2
    assert rep.gldim <= tree.n + 1 == 3
    assert rep.multiplicity == 2  # n + 1 = 3 > e = 2: recorded, not a failure


def test_projective_has_pd_zero():
    r = semigroup_ring(QQ, [2, 3])
    _, alg = family_algebra(r)
    cert = minimal_projective_resolution(projective_gamma(alg, 0), cap=8)
    assert cert.pd == 0 and not cert.capped


def test_simple_resolution_steps_dvr():
    r = semigroup_ring(QQ, [1])
    _, alg = family_algebra(r)
    cert = minimal_projective_resolution(SimpleModule(alg, 0), cap=8)
    assert cert.pd == 1
    assert cert.cover_types == [[0], [0]]  # P -> S, then P -> rad P = (t)


def test_top_of_projective_is_one_dimensional():
    from endochain.endo import gamma_top

    r = semigroup_ring(QQ, [2, 5])
    _, alg = family_algebra(r)
    for i in range(alg.k):
        tops = gamma_top(projective_gamma(alg, i))
        assert len(tops) == 1 and tops[0][0] == i


def test_syzygy_of_rad_projective_terminates():
    r = semigroup_ring(QQ, [2, 3])
    _, alg = family_algebra(r)
    omega = rad_projective_gamma(alg, 1)
    types, syz = minimal_cover_syzygy(omega)
    assert len(types) == 2  # the hand computation: P_0 (+) P_1 covers rad P_1
    types2, syz2 = minimal_cover_syzygy(syz)
    assert syz2.is_zero()


def test_duplicate_summand_guard():
    r = semigroup_ring(QQ, [2, 3])
    e = normalization_lattice(r)
    with pytest.raises(DuplicateSummand):
        build_endo_algebra(r, [r.self_lattice, e, e])
    # isomorphic but unequal: m = t^2 E is a twist of E
    with pytest.raises(DuplicateSummand):
        build_endo_algebra(r, [r.self_lattice, e, r.maximal_ideal_lattice()])


def test_projectivization_checks():
    for gens in [[2, 3], [2, 5], [3, 4, 5]]:
        r = semigroup_ring(QQ, gens)
        _, alg = family_algebra(r)
        assert projectivization_check(alg)


def test_fcmt_a2g_family():
    # A_{2g} curves <2, 2g+1>: overrings are a complete MCM list; gldim
    # is exactly 2 for every g >= 1
    for g in [1, 2, 3]:
        gens = [2, 2 * g + 1]
        r = semigroup_ring(QQ, gens)
        tree = build_chain_tree(r)
        fam = chain_family(tree)
        rep = fcmt_check(r, fam.lattices(), labels=fam.labels(), n=tree.n)
        assert rep.gldim == 2
        assert rep.assumptions


def test_fcmt_requires_free_summand():
    r = semigroup_ring(QQ, [2, 3])
    e = normalization_lattice(r)
    with pytest.raises(MissingFreeSummand):
        fcmt_check(r, [e])


def test_fcmt_dvr():
    r = semigroup_ring(QQ, [1])
    rep = fcmt_check(r, [r.self_lattice], n=0)
    assert rep.gldim == 1


def test_prime_field_agrees_with_rationals():
    f101 = FieldSpec("prime", 101)
    r = semigroup_ring(f101, [2, 5])
    tree, alg = family_algebra(r)
    rep = global_dimension(alg, n=tree.n)
    assert rep.gldim == 2 and rep.pd_per_simple == [1, 2, 2]


def test_characteristic_too_small():
    f5 = FieldSpec("prime", 5)
    r = semigroup_ring(f5, [2, 7])
    with pytest.raises(CharacteristicTooSmall):
        family_algebra(r)


def test_gldim_report_json_shape():
    r = semigroup_ring(QQ, [2, 3])
    tree, alg = family_algebra(r)
    rep = global_dimension(alg, n=tree.n).as_json()
    for key in (
        "summands",
        "pd_per_simple",
        "gldim",
        "bound_chain_depth_plus_one",
        "bound_fcmt_max_2_d",
        "multiplicity",
        "chain_depth",
    ):
        assert key in rep


def test_radical_block_description():
    from endochain.endo import radical

    r = semigroup_ring(QQ, [2, 3])
    _, alg = family_algebra(r)
    blocks = radical(alg)
    # off-diagonal blocks are the full Hom lattices
    assert blocks[(0, 1)] == alg.hom[(0, 1)]
    assert blocks[(1, 0)] == alg.hom[(1, 0)]
    # diagonal blocks are proper: the identity is not in the radical
    one = alg.hom[(0, 0)].ambient.unit_vec(QQ, 0, 0)
    assert alg.hom[(0, 0)].member(one)
    assert not blocks[(0, 0)].member(one)
