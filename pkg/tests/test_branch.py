import itertools

import pytest
from hypothesis import given, strategies as st

from img_branch import branch as B, img
from img_branch.branch import AbVector, SigmaMap, SubgroupZ4_5, howell_form
from img_branch.levels import truncate
from img_branch.mealy import equal

vectors = st.tuples(*[st.integers(0, 3)] * 5).map(AbVector)


def span_by_enumeration(gens):
    out = {AbVector.zero()}
    frontier = list(out)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = v + g
                if w not in out:
                    out.add(w)
                    nxt.append(w)
        frontier = nxt
    return out


def test_section_identities():
    rep = B.verify_section_identities()
    assert rep.ok and len(rep.items) == len(B.SECTION_IDENTITIES)


def test_generator_orders():
    assert B.verify_generator_orders().ok


def test_pair_builds_sections():
    y = img.k_generators()["y"]
    assert equal(B.pair("x", "1"), y)


def test_conjugation_table():
    rep = B.verify_conjugation_table()
    assert rep.ok and len(B.CONJUGATION_TABLE) == 15


def test_section_parity_membership():
    ty = img.element("t y^-2")
    assert B.section_parity_membership("y x^-2", "", ty) is False
    xy = B.commutator(img.k_generators()["y"], img.k_generators()["t"])
    assert B.section_parity_membership("x y x^-1 y^-1", "", xy) is True
    with pytest.raises(B.CertificateError):
        B.section_parity_membership("x", "", ty)


def test_commutator_parities():
    rep = B.verify_commutator_parities()
    assert rep.ok
    names = {i["check"] for i in rep.items}
    assert {"[y,z] = 1", "[y,w] = 1", "[z,t] = 1", "[t,w] = 1"} <= names


def test_ab_vector_parsing():
    assert AbVector.parse("2z+w") == AbVector((0, 0, 2, 0, 1))
    assert AbVector.parse("-w-2z") == AbVector((0, 0, 2, 0, 3))
    assert AbVector.parse("2z-w") == AbVector.parse("-w-2z")
    assert str(AbVector.parse("2z+w")) == "2z+w"
    assert AbVector.parse("x+y").parity() == 0


def test_sigma_matrix_reproduces_images():
    sigma = SigmaMap.default()
    for name, image in B.SIGMA_IMAGES.items():
        assert sigma(AbVector.basis(name)) == AbVector.parse(image)
    fixed = AbVector.parse("2z+w")
    assert B.sigma_apply(fixed) == fixed
    assert B.sigma_apply(AbVector.zero()) == AbVector.zero()


@given(vectors, vectors)
def test_sigma_is_additive(u, v):
    assert B.sigma_apply(u + v) == B.sigma_apply(u) + B.sigma_apply(v)


@given(st.lists(vectors, max_size=4))
def test_howell_form_matches_enumeration(gens):
    H = SubgroupZ4_5.span(gens)
    brute = span_by_enumeration(gens)
    assert H.elements() == brute
    assert H.order() == len(brute)


@given(st.lists(vectors, max_size=3), st.lists(vectors, max_size=3))
def test_howell_form_is_canonical(g1, g2):
    same = span_by_enumeration(g1) == span_by_enumeration(g2)
    assert (SubgroupZ4_5.span(g1) == SubgroupZ4_5.span(g2)) == same


@given(st.lists(vectors, min_size=1, max_size=3), st.permutations(range(3)))
def test_howell_form_ignores_generator_order(gens, perm):
    shuffled = [gens[i] for i in perm if i < len(gens)]
    assert SubgroupZ4_5.span(gens) == SubgroupZ4_5.span(shuffled)


def test_howell_form_small_cases():
    assert howell_form([]) == ()
    assert howell_form([(0, 0, 2, 0, 1)]) == ((0, 0, 2, 0, 1), (0, 0, 0, 0, 2))
    assert SubgroupZ4_5.full().order() == 1024
    assert SubgroupZ4_5.span([]).order() == 1


def test_sigma_chain():
    sc = B.sigma_chain()
    orders = [H.order() for H in sc.chain]
    assert orders == [1024, 16, 8, 4]
    zw = SubgroupZ4_5.span([AbVector.parse("z"), AbVector.parse("w")])
    assert sc.chain[1] == zw
    assert sc.chain[2] == SubgroupZ4_5.span([AbVector.parse("2z+w"), AbVector.parse("w")])
    assert sc.fixed == SubgroupZ4_5.span([AbVector.parse("2z+w")])
    assert sc.generator == AbVector.parse("2z+w")
    assert sc.fixed.image(SigmaMap.default()) == sc.fixed
    for big, small in itertools.pairwise(sc.chain):
        assert small.elements() <= big.elements()
    assert B.verify_sigma_chain().ok


def test_sigma_images_at_levels():
    for n in (5, 6, 7, 8):
        assert B.verify_sigma_images_at_level(n).ok
    with pytest.raises(ValueError):
        B.verify_sigma_images_at_level(4)


def test_sigma_identity_image_trivial():
    lifted = truncate(B.pair(img.identity(), img.identity()), 5)
    assert img.k_prime_level(5).coset_key(lifted) == img.k_prime_level(5).coset_key(
        truncate(img.identity(), 5)
    )


def test_k_mod_scriptk():
    rep = B.verify_K_mod_scriptK()
    assert rep.ok
    assert rep.summary == {"K_mod_scriptK": 16, "scriptK_mod_Kprime": 64}


def test_geometric_products():
    kg = img.k_generators()
    out = B.geometric_product_generators([kg["x"]], 1)
    assert equal(out[0], kg["y"]) and equal(out[1], kg["z"])
    assert all(g.is_identity() for g in B.geometric_product_generators([img.identity()], 3))
    K3 = img.k_level(3)
    for g in B.geometric_product_generators(list(kg.values()), 1):
        assert truncate(g, 3) in K3
    assert len(B.geometric_product_generators([kg["x"]], 3)) == 8
    with pytest.raises(ValueError):
        B.geometric_product_generators([kg["x"]], 0)


def test_regular_branch_and_rigid_kernel():
    assert B.verify_regular_branch().ok
    assert B.verify_rigid_kernel_witness().ok


def test_kk_c45_and_no_csp():
    kk = B.verify_kk_c45()
    assert kk.ok and kk.summary["K_mod_Kprime"] == 1024
    rep = B.no_csp_obstruction()
    assert rep.ok
    assert rep.summary["level_indices"] == {5: 64, 6: 64, 7: 64, 8: 64}
    assert rep.summary["K_mod_Kprime"] == 1024
