import itertools

import numpy as np
import pytest

from yamabeflow.complex import (
    ComplexError,
    MetricAssignment,
    ParseError,
    SimplicialComplex,
    load_complex,
    parse_complex,
    preset,
    serialize_complex,
    validate_complex,
)


DOUBLE = "tet 1 2 3 4\ntet 1 2 3 4\n"


def test_parse_defaults_and_comments():
    c, m = parse_complex("# two copies\nradius 4 2.5  # heavy vertex\n" + DOUBLE)
    assert c.tetrahedra == ((1, 2, 3, 4), (1, 2, 3, 4))
    assert c.vertices == (1, 2, 3, 4)
    assert dict(m.r) == {1: 1.0, 2: 1.0, 3: 1.0, 4: 2.5}


def test_double_tetrahedron_incidence():
    c, _ = preset("double_tetrahedron")
    assert len(c.edges) == 6
    assert len(c.faces) == 4
    assert all(tets == (0, 1) for tets in c.face_tets.values())
    assert all(c.star[v] == (0, 1) for v in c.vertices)
    assert validate_complex(c) == []


def test_boundary_simplex_incidence():
    c, _ = preset("boundary_4_simplex")
    assert c.vertices == (1, 2, 3, 4, 5)
    assert len(c.tetrahedra) == 5
    assert len(c.edges) == 10 and len(c.faces) == 10
    assert all(len(s) == 4 for s in c.star.values())
    assert all(len(t) == 3 for t in c.edge_tets.values())
    assert validate_complex(c) == []


def test_tet_array_keeps_slot_order():
    c = SimplicialComplex(((7, 3, 5, 9), (9, 5, 3, 7)))
    assert c.tet_array.tolist() == [[2, 0, 1, 3], [3, 1, 0, 2]]


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("tet 1 2 3\n", 1),
        ("tet 1 2 3 4\ntet 1 2 x 4\n", 2),
        ("tet 1 2 3 4\n\nradius 1 -2\n", 3),
        ("radius 1 0\n", 1),
        ("radius 1 nan\n", 1),
        ("radius 1 1\nradius 1 2\n", 2),
        ("cube 1 2 3 4\n", 1),
        ("tet 1 2 3 -4\n", 1),
        ("radius 1\n", 1),
    ],
)
def test_parse_errors_report_line(text, lineno):
    with pytest.raises(ParseError) as exc:
        parse_complex(text)
    assert exc.value.lineno == lineno
    assert str(exc.value).startswith(f"line {lineno}:")


def test_boundary_complex_rejected():
    with pytest.raises(ComplexError) as exc:
        parse_complex("tet 1 2 3 4\n")
    assert len(exc.value.report) == 4
    assert all("boundary face" in line for line in exc.value.report)


def test_validation_report_lists_every_problem():
    tets = [(1, 2, 3, 4)] * 3 + [(5, 6, 7, 8)] * 2 + [(1, 1, 2, 3)]
    report = validate_complex(SimplicialComplex(tuple(tets)))
    assert any("non-manifold face" in s for s in report)
    assert any("repeated vertex in tetrahedron 5" in s for s in report)
    assert any("disconnected skeleton: 2 components" in s for s in report)
    assert validate_complex(SimplicialComplex(())) == ["empty complex: no tetrahedra"]


def test_serialize_sorted_and_round_trips(tmp_path):
    c = SimplicialComplex(tuple(itertools.combinations((9, 2, 5, 7, 1), 4)))
    m = MetricAssignment({v: 1.0 + 0.1 * v for v in c.vertices}).with_radii({9: 1.0 / 3.0})
    text = serialize_complex(c, m)
    radius_ids = [int(line.split()[1]) for line in text.splitlines() if line.startswith("radius")]
    assert radius_ids == sorted(radius_ids)
    tet_lines = [line for line in text.splitlines() if line.startswith("tet")]
    assert tet_lines == ["tet " + " ".join(map(str, t)) for t in c.tetrahedra]
    path = tmp_path / "c.txt"
    path.write_text(text)
    c2, m2 = load_complex(path)
    assert c2.tetrahedra == c.tetrahedra
    assert dict(m2.r) == dict(m.r)


def test_metric_is_immutable_and_validated():
    m = MetricAssignment({1: 1.0, 2: 2.0})
    with pytest.raises(TypeError):
        m.r[1] = 3.0
    with pytest.raises(ComplexError):
        MetricAssignment({1: 0.0})
    with pytest.raises(ComplexError):
        m.with_radii({2: -1.0})
    assert m.edge_length(1, 2) == 3.0
    assert np.array_equal(MetricAssignment.from_array((1, 2), [3, 4]).array((2, 1)), [4.0, 3.0])


def test_unknown_preset():
    with pytest.raises(ComplexError):
        preset("poincare_sphere")
