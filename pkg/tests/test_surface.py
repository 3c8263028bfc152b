import pytest

import oracle
from conftest import random_complex
from quasitopy import catalog
from quasitopy.errors import QscError
from quasitopy.surface import (
    Alignment,
    Gluing,
    SideRef,
    SurfaceComplex,
    evaluation_basis,
    homology_torsion,
    reverse_face,
    subdivide_side,
    validate_complex,
    validate_path,
)

# name -> (chi, orientable, boundary circles, rank H1, rank H1 rel)
KNOWN = {
    "torus": (0, True, 0, 2, 2),
    "klein": (0, False, 0, 1, 1),
    "genus2": (-2, True, 0, 4, 4),
    "disk": (1, True, 1, 0, 0),
    "cone_disk": (1, True, 1, 0, 0),
    "annulus": (0, True, 2, 1, 1),
    "mobius": (0, False, 1, 1, 0),
    "pants": (-1, True, 3, 2, 2),
    "sphere": (2, True, 0, 0, 0),
    "rp2": (1, False, 0, 0, 0),
    "two_square_disk": (1, True, 1, 0, 0),
    "cylinder2": (0, True, 2, 1, 1),
    "torus2": (0, True, 0, 2, 2),
}


def test_known_summaries(corpus_complex):
    name, c = corpus_complex
    s = validate_complex(c)
    got = (s.euler_characteristic, s.orientable, s.boundary_component_count, s.h1_rank_abs, s.h1_rank_rel)
    assert got == KNOWN[name]
    assert s.euler_characteristic == s.vertex_count - s.edge_count + s.face_count


def test_square_torus_counts():
    s = validate_complex(catalog.torus())
    assert (s.vertex_count, s.edge_count, s.face_count) == (1, 2, 1)


def test_ranks_match_cellular_oracle_on_corpus(corpus_complex):
    _, c = corpus_complex
    s = validate_complex(c)
    assert (s.h1_rank_abs, s.h1_rank_rel) == oracle.betti1(c)
    assert s.euler_characteristic == oracle.euler(c)
    assert len(evaluation_basis(c, "absolute")) == s.h1_rank_abs
    assert len(evaluation_basis(c, "relative")) == s.h1_rank_rel


@pytest.mark.parametrize("seed", range(40))
def test_ranks_match_cellular_oracle_random(seed):
    c = random_complex(seed)
    s = validate_complex(c)
    assert (s.h1_rank_abs, s.h1_rank_rel) == oracle.betti1(c)
    assert s.euler_characteristic == oracle.euler(c)
    for mode, rank in (("absolute", s.h1_rank_abs), ("relative", s.h1_rank_rel)):
        basis = evaluation_basis(c, mode)
        assert len(basis) == rank
        for p in basis:
            validate_path(c, p)
            if mode == "absolute":
                assert p.closed


def test_surface_formula_for_orientable():
    for seed in range(30):
        c = random_complex(seed, orientable_only=True)
        s = validate_complex(c)
        if s.component_count != 1:
            continue
        b = s.boundary_component_count
        genus2 = 2 - b - s.euler_characteristic
        assert genus2 % 2 == 0 and genus2 >= 0
        assert s.h1_rank_abs == genus2 + max(b - 1, 0)


def test_klein_torsion():
    assert homology_torsion(catalog.klein_bottle(), "absolute") == [2]
    assert homology_torsion(catalog.torus(), "absolute") == []


def test_disk_relative_basis_empty():
    assert evaluation_basis(catalog.disk(), "relative") == []


def test_annulus_bases():
    rel = evaluation_basis(catalog.annulus(), "relative")
    ab = evaluation_basis(catalog.annulus(), "absolute")
    assert [p.kind for p in rel] == ["boundary_to_boundary"]
    assert [p.kind for p in ab] == ["closed"]


def test_structural_errors():
    F = SideRef
    with pytest.raises(QscError) as e:
        validate_complex(SurfaceComplex((("F", 4), ("F", 3))))
    assert e.value.code == "DUPLICATE_ID"
    with pytest.raises(QscError) as e:
        validate_complex(SurfaceComplex((("F", 4),), (Gluing("g", F("F", 0), F("F", 7), Alignment.COMPATIBLE),)))
    assert e.value.code == "DANGLING_SIDE_REF"
    with pytest.raises(QscError) as e:
        validate_complex(
            SurfaceComplex(
                (("F", 4),),
                (
                    Gluing("g", F("F", 0), F("F", 2), Alignment.COMPATIBLE),
                    Gluing("h", F("F", 2), F("F", 1), Alignment.COMPATIBLE),
                ),
            )
        )
    assert e.value.code == "SIDE_GLUED_TWICE"
    with pytest.raises(QscError) as e:
        evaluation_basis(SurfaceComplex((("F", 4), ("F", 3))))
    assert e.value.code == "NOT_VALID_COMPLEX"


def test_subdivide_examples():
    d = subdivide_side(catalog.disk(), SideRef("D", 0))
    assert d.side_count("D") == 2
    assert validate_complex(d).euler_characteristic == 1
    a = validate_complex(subdivide_side(catalog.annulus(), SideRef("A", 1)))
    assert (a.euler_characteristic, a.boundary_component_count) == (0, 2)
    with pytest.raises(QscError) as e:
        subdivide_side(catalog.torus(), SideRef("F", 0))
    assert e.value.code == "SIDE_NOT_FREE"


def _topology(c):
    s = validate_complex(c)
    return s.euler_characteristic, s.orientable, s.component_count, s.boundary_component_count


@pytest.mark.parametrize("seed", range(30))
def test_subdivision_keeps_topology(seed):
    c = random_complex(seed)
    before = _topology(c)
    for s in c.free_sides():
        assert _topology(subdivide_side(c, s)) == before


@pytest.mark.parametrize("seed", range(30))
def test_reverse_face_gauge(seed):
    # re-signing one face toggles every alignment it meets once; the surface is unchanged
    c = random_complex(seed)
    s = validate_complex(c)
    for f, _ in c.faces:
        r = validate_complex(reverse_face(c, f))
        assert r == s
        assert reverse_face(reverse_face(c, f), f) == c


def test_reverse_face_single_self_glued_face():
    c = catalog.klein_bottle()
    s = validate_complex(c)
    # a single self-glued face: reversal keeps alignments, so the verdict stays put
    assert validate_complex(reverse_face(c, "F")).orientable is s.orientable is False
