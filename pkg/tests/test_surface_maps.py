from __future__ import annotations

import random
from fractions import Fraction

import pytest

import mapzoo
from smallcancel.presentations import Presentation, symmetrize
from smallcancel.surface_maps import (
    JUNCTION,
    ONE_SPECIAL_2,
    ORDINARY,
    SPECIAL_1,
    SPECIAL_1_PLUS_JUNCTION,
    SPECIAL_2,
    TOWN_EXIT,
    TWO_JUNCTIONS,
    TWO_SPECIAL_1,
    Highway,
    Junction,
    Model,
    ModelNode,
    SurfaceMap,
    Town,
    VanKampenTorusDiagram,
    build_scheme,
    build_wicks_torus,
    check_cprime_map,
    classify_cells,
    contract_edge,
    dump_map,
    euler_characteristic,
    extract_model,
    model_configuration,
    offhole_forest_check,
    parse_map,
    piece_endpoints,
    piece_sides,
    pieces,
    trace_faces,
    validate_diagram,
    weight_test,
    WeightScheme,
)
from smallcancel.words import Word


def test_constructor_rejects_malformed_input():
    with pytest.raises(ValueError):
        SurfaceMap([(0, 0)], [(0, 1)])  # dart twice
    with pytest.raises(ValueError):
        SurfaceMap([(0, 1)], [(0, 2)])  # unknown dart in pairing
    with pytest.raises(ValueError):
        SurfaceMap([(0, 1)], [(0, 0)])  # self-paired dart
    with pytest.raises(ValueError):
        SurfaceMap([(0, 1, 2, 3)], [(0, 1)])  # unpaired darts
    with pytest.raises(ValueError):
        # two wedges with no connection
        SurfaceMap([(0, 1), (2, 3)], [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        SurfaceMap([(0, 1)], [(0, 1)], holes={5})
    with pytest.raises(ValueError):
        SurfaceMap([(0, 1)], [(0, 1)], labels={0: 0})
    with pytest.raises(ValueError):
        SurfaceMap([(0, 1)], [(0, 1)], labels={0: 1, 1: 1})
    with pytest.raises(ValueError):
        SurfaceMap([(0, 1), ()], [(0, 1)])


def test_face_tracing_on_the_two_one_vertex_maps():
    rose = mapzoo.torus_rose()
    assert rose.faces == ((0, 3, 1, 2),)
    assert euler_characteristic(rose) == 0

    wedge = mapzoo.sphere_wedge()
    assert trace_faces(wedge) == ((0, 2), (1,), (3,))
    assert wedge.euler_characteristic() == 2


def test_face_tracing_is_deterministic_from_least_darts():
    for m in mapzoo.weight_corpus():
        seen = set()
        for walk in m.faces:
            assert walk[0] == min(walk)
            assert walk[0] == min(d for d in m.darts if d not in seen)
            seen.update(walk)


def test_tetrahedron_structure():
    tet = mapzoo.tetrahedron()
    assert tet.face_count == 4
    assert tet.euler_characteristic() == 2
    assert all(len(walk) == 3 for walk in tet.faces)
    assert len(pieces(tet)) == 6


def test_corner_bookkeeping():
    m = mapzoo.two_special1_map()
    corners = m.corners()
    assert len(corners) == len(m.darts)
    assert len(set(corners)) == len(corners)
    for c in corners:
        d = m.dart_of_corner(c)
        assert m.corner_of(d) == c
        assert m.corner_vertex(c) == m.vertex_of(d)
        left, right = m.corner_neighbors(c)
        assert m.corner_vertex(left) == m.corner_vertex(c)
        assert m.corner_vertex(right) == m.corner_vertex(c)
    for v in range(m.vertex_count):
        assert len(m.corners_at_vertex(v)) == m.degree(v)


def test_weight_identity_for_random_rational_schemes():
    rng = random.Random(20260815)
    corpus = mapzoo.weight_corpus()
    for trial in range(60):
        m = corpus[trial % len(corpus)]
        weights = {
            c: Fraction(rng.randrange(-24, 25), rng.randrange(1, 13))
            for c in m.corners()
        }
        result = weight_test(m, WeightScheme(weights))
        assert result.total == 2 * m.euler_characteristic()


def test_weight_test_requires_full_coverage():
    m = mapzoo.torus_rose()
    weights = {c: Fraction(1) for c in m.corners()}
    missing = dict(weights)
    missing.popitem()
    with pytest.raises(ValueError):
        weight_test(m, WeightScheme(missing))
    extra = dict(weights)
    extra[(7, 7)] = Fraction(1)
    with pytest.raises(ValueError):
        weight_test(m, WeightScheme(extra))


def one_hole_corpus():
    return [
        mapzoo.torus_rose(hole=True),
        mapzoo.tetrahedron(holes={0}),
        mapzoo.theta_hole(),
        mapzoo.rose_hole(),
        mapzoo.two_special1_map(),
        mapzoo.bead_map(),
        mapzoo.special1_plus_junction_map(),
        mapzoo.square_town_map(),
        mapzoo.shared_edge_map(),
    ]


def test_lemma1_scheme_concentrates_curvature_in_faces():
    for m in one_hole_corpus():
        result = weight_test(m, build_scheme(m, "lemma1"))
        hole = next(iter(m.holes))
        assert result.face_curvatures[hole] == 2
        assert all(k <= 0 for k in result.vertex_curvatures.values())
    with pytest.raises(ValueError):
        build_scheme(mapzoo.tetrahedron(holes={0, 1}), "lemma1")
    with pytest.raises(ValueError):
        build_scheme(mapzoo.tetrahedron(holes={0}), "lemma3")


def test_lemma2_scheme_weights_on_holed_tetrahedron():
    m = mapzoo.tetrahedron(holes={0})
    scheme = build_scheme(m, "lemma2")
    values = sorted(set(scheme.weights.values()))
    assert values == [Fraction(1, 2), Fraction(1)]
    # the vertex not on the hole keeps weight-1 corners only
    hole_vertices = {m.vertex_of(d) for d in m.faces[0]}
    result = weight_test(m, scheme)
    assert result.total == 4
    for v in range(m.vertex_count):
        if v not in hole_vertices:
            assert result.vertex_curvatures[v] == -1
        else:
            assert result.vertex_curvatures[v] == 0


def test_lemma2_cell_curvature_table():
    # ordinary -> 0, 1-special -> -1, 2-special -> -2, hole -> 2
    cases = [
        (mapzoo.two_special1_map(), {SPECIAL_1: -1}),
        (mapzoo.bead_map(), {SPECIAL_1: -1, ORDINARY: 0}),
        (mapzoo.special1_plus_junction_map(), {SPECIAL_1: -1}),
        (mapzoo.square_town_map(), {SPECIAL_2: -2}),
    ]
    for m, expected in cases:
        classes = classify_cells(m)
        result = weight_test(m, build_scheme(m, "lemma2"))
        hole = next(iter(m.holes))
        assert result.face_curvatures[hole] == 2
        seen_kinds = set()
        for f in m.interior_faces():
            kind = classes.kinds[f]
            assert result.face_curvatures[f] == expected[kind]
            seen_kinds.add(kind)
        assert seen_kinds == set(expected)


def test_pieces_on_subdivided_maps():
    tet3 = mapzoo.subdivide_edges(mapzoo.tetrahedron(), 2)
    ps = pieces(tet3)
    assert len(ps) == 6
    assert all(p.length == 3 for p in ps)

    theta = mapzoo.theta_hole()
    assert len(pieces(theta)) == 3
    rose = mapzoo.rose_hole()
    assert len(pieces(rose)) == 2

    t = build_wicks_torus(Word.parse("ab"), Word.parse("c"), Word.parse("d"))
    lengths = sorted(p.length for p in pieces(t))
    assert lengths == [1, 1, 2]

    for m, skeleton_edges in [
        (mapzoo.subdivide_edges(mapzoo.tetrahedron(), 1), 6),
        (mapzoo.subdivide_edges(mapzoo.torus_rose_unlabeled(), 3), 2),
        (build_wicks_torus(Word.parse("ab"), Word.parse("ba"), Word()), 2),
    ]:
        assert len(pieces(m)) == skeleton_edges


def test_pieces_reject_degenerate_maps():
    with pytest.raises(ValueError):
        pieces(SurfaceMap([(0,), (1,)], [(0, 1)]))  # degree-1 vertices
    with pytest.raises(ValueError):
        pieces(SurfaceMap([(0, 3), (1, 2)], [(0, 1), (2, 3)]))  # a circle


def test_piece_sides_and_endpoints():
    theta = mapzoo.theta_hole()
    for p in pieces(theta):
        assert piece_sides(theta, p) == (0, 0)
        u, v = piece_endpoints(theta, p)
        assert {theta.degree(u), theta.degree(v)} == {3}

    square = mapzoo.square_town_map()
    side_sets = sorted(piece_sides(square, p) for p in pieces(square))
    assert side_sets.count((0, 0)) == 2  # the two loops: hole on both sides
    assert side_sets.count((0, 1)) + side_sets.count((1, 0)) == 4


def test_small_cancellation_conditions_on_maps():
    tet = mapzoo.tetrahedron()
    assert check_cprime_map(tet, Fraction(1, 2)).ok
    report = check_cprime_map(tet, Fraction(1, 3))
    assert not report.ok
    assert any("between interior cells" in f for f in report.findings)

    assert check_cprime_map(mapzoo.square_town_map(), Fraction(1, 6)).ok

    stretched = mapzoo.stretched_triangle_map()
    report = check_cprime_map(stretched, Fraction(1, 6))
    assert not report.ok
    assert any("and a hole" in f for f in report.findings)


def test_classify_cells_counts_and_floor_finding():
    m = mapzoo.two_special1_map()
    classes = classify_cells(m)
    assert classes.count(SPECIAL_1) == 2
    assert not classes.findings

    pinched = mapzoo.pinched_bigon_map()
    classes = classify_cells(pinched)
    assert "other(1)" in classes.kinds.values()
    assert any("fewer than 2" in f for f in classes.findings)


def test_offhole_forest_check():
    assert offhole_forest_check(mapzoo.two_special1_map()).is_forest
    assert offhole_forest_check(mapzoo.two_special1_map()).offhole_edge_count == 0

    check = offhole_forest_check(mapzoo.shared_edge_map())
    assert check.is_forest
    assert check.offhole_edge_count == 1
    assert check.high_degree_vertices == ()

    assert not offhole_forest_check(mapzoo.double_diagonal_map()).is_forest

    tet = mapzoo.tetrahedron()  # no holes: every edge off-hole
    check = offhole_forest_check(tet)
    assert not check.is_forest
    assert len(check.high_degree_vertices) == 4
    assert not check.at_most_two_high


def test_contract_edge_preserves_faces_and_characteristic():
    tet = mapzoo.tetrahedron()
    c = contract_edge(tet, 0)
    assert (c.vertex_count, c.edge_count, c.face_count) == (3, 5, 4)
    assert c.euler_characteristic() == tet.euler_characteristic()
    removed = {0, 1}
    old_walks = [
        tuple(d for d in walk if d not in removed) for walk in tet.faces
    ]
    for old in old_walks:
        assert any(
            len(old) == len(new)
            and any(new[i:] + new[:i] == old for i in range(len(new)))
            for new in c.faces
        )

    with pytest.raises(ValueError):
        contract_edge(mapzoo.torus_rose(), 0)

    m = mapzoo.shared_edge_map()
    c = contract_edge(m, 0)
    assert len(c.holes) == 1
    hole = next(iter(c.holes))
    assert len(c.faces[hole]) == 8


def test_extract_model_on_junction_only_maps():
    model = extract_model(mapzoo.theta_hole())
    assert model.towns == ()
    assert len(model.junctions) == 2
    assert len(model.highways) == 3
    assert all(h.length == 1 for h in model.highways)
    assert all(
        {end.kind for end in h.ends} == {JUNCTION} for h in model.highways
    )
    assert model_configuration(model) == TWO_JUNCTIONS

    # the degree-4 vertex splits into two junctions and a zero-length link
    model = extract_model(mapzoo.rose_hole())
    assert model.towns == ()
    assert len(model.junctions) == 2
    lengths = sorted(h.length for h in model.highways)
    assert lengths == [0, 1, 1]
    assert model_configuration(model) == TWO_JUNCTIONS


def test_extract_model_on_town_maps():
    model = extract_model(mapzoo.two_special1_map())
    assert len(model.towns) == 2
    assert all(t.perimeter == 3 and len(t.exits) == 3 for t in model.towns)
    assert model.junctions == ()
    assert len(model.highways) == 3
    assert model.town_attachments(0) == 3
    assert model.town_attachments(1) == 3
    assert model_configuration(model) == TWO_SPECIAL_1

    model = extract_model(mapzoo.bead_map())
    assert len(model.towns) == 3
    attach = sorted(model.town_attachments(t.index) for t in model.towns)
    assert attach == [2, 3, 3]
    zero = [h for h in model.highways if h.length == 0]
    assert len(zero) == 2
    assert model_configuration(model) == TWO_SPECIAL_1

    model = extract_model(mapzoo.special1_plus_junction_map())
    assert len(model.towns) == 1
    assert len(model.junctions) == 1
    kinds = sorted(
        tuple(sorted(end.kind for end in h.ends)) for h in model.highways
    )
    assert kinds == [("exit", "junction")] * 3
    assert model_configuration(model) == SPECIAL_1_PLUS_JUNCTION

    model = extract_model(mapzoo.square_town_map())
    assert len(model.towns) == 1
    assert model.towns[0].exits == (0, 1, 2, 3)
    assert model.towns[0].arcs() == (1, 1, 1, 1)
    assert model.town_attachments(0) == 4
    assert model_configuration(model) == ONE_SPECIAL_2


def test_extract_model_contracts_shared_edges():
    # two triangle cells sharing one off-hole edge, and the same picture
    # with the shared edge stretched into an off-hole path of length 2
    single = extract_model(mapzoo.shared_edge_map())
    stretched = extract_model(mapzoo.subdivide_one(mapzoo.shared_edge_map(), 0))
    for model in (single, stretched):
        assert model.map.vertex_count == 3
        assert model.map.edge_count == 6
        assert len(model.towns) == 2
        assert all(t.perimeter == 2 for t in model.towns)
        assert all(model.town_attachments(t.index) == 2 for t in model.towns)
        assert len(model.junctions) == 2
        zero = [h for h in model.highways if h.length == 0]
        assert len(zero) == 3
        # the merged vertex carries one corner of each town: the towns
        # stay adjacent through a zero-length town-to-town highway
        town_links = [
            h for h in zero if {e.kind for e in h.ends} == {TOWN_EXIT}
        ]
        assert len(town_links) == 1
        assert {e.index for e in town_links[0].ends} == {0, 1}
        assert model_configuration(model) == TWO_JUNCTIONS


def test_extract_model_requires_forest_and_single_hole():
    with pytest.raises(ValueError):
        extract_model(mapzoo.double_diagonal_map())
    with pytest.raises(ValueError):
        extract_model(mapzoo.tetrahedron())


def test_model_configuration_rejects_other_shapes():
    base = extract_model(mapzoo.theta_hole())
    towns = tuple(
        Town(i, i, (0, 1, 2), (0, 1, 2)) for i in range(3)
    )
    junction = Junction(0, 0)
    highways = tuple(
        Highway(
            k,
            (ModelNode(TOWN_EXIT, k % 3, k // 3), ModelNode(JUNCTION, 0)),
            1,
        )
        for k in range(9)
    )
    bad = Model(base.map, towns, (junction,), highways, ())
    with pytest.raises(ValueError, match="no admissible configuration"):
        model_configuration(bad)

    lopsided = Model(
        base.map,
        (Town(0, 0, (0, 1, 2, 3, 4), (0, 1, 2, 3, 4)),),
        (),
        tuple(
            Highway(
                k,
                (ModelNode(TOWN_EXIT, 0, k), ModelNode(JUNCTION, 0)),
                1,
            )
            for k in range(5)
        ),
        (),
    )
    with pytest.raises(ValueError, match="inadmissible"):
        model_configuration(lopsided)


def test_build_wicks_torus_shapes():
    rose = build_wicks_torus(Word.parse("a"), Word.parse("b"), Word())
    assert rose.vertex_count == 1 and rose.degree(0) == 4
    assert rose.edge_count == 2 and rose.face_count == 1
    assert rose.holes == frozenset({0})
    read = rose.face_label(0)
    target = tuple(Word.parse("abAB").letters)
    assert any(read[i:] + read[:i] == target for i in range(4))

    theta = build_wicks_torus(Word.parse("a"), Word.parse("b"), Word.parse("c"))
    assert theta.vertex_count == 2
    assert all(theta.degree(v) == 3 for v in range(2))
    assert theta.edge_count == 3 and theta.face_count == 1
    assert theta.euler_characteristic() == 0

    sub = build_wicks_torus(Word.parse("ab"), Word.parse("c"), Word.parse("d"))
    assert sorted(sub.degree(v) for v in range(sub.vertex_count)) == [2, 3, 3]
    assert sub.edge_count == 4
    read = sub.face_label(0)
    target = tuple(Word.parse("abcdBACD").letters)
    assert any(read[i:] + read[:i] == target for i in range(len(read)))


def test_build_wicks_torus_reads_the_form():
    triples = [
        ("a", "b", ""),
        ("a", "b", "c"),
        ("ab", "c", "d"),
        ("ab", "ba", ""),
        ("ab", "ca", "ca"),
    ]
    for xs, ys, zs in triples:
        x, y, z = Word.parse(xs), Word.parse(ys), Word.parse(zs)
        m = build_wicks_torus(x, y, z)
        assert m.face_count == 1
        assert m.euler_characteristic() == 0
        form = (x * y * z * x.inverse() * y.inverse() * z.inverse()).letters
        read = m.face_label(0)
        assert len(read) == len(form)
        assert any(read[i:] + read[:i] == form for i in range(len(read)))


def test_build_wicks_torus_rejects_cancelling_input():
    with pytest.raises(ValueError):
        build_wicks_torus(Word(), Word(), Word())
    with pytest.raises(ValueError):
        build_wicks_torus(Word.parse("a"), Word.parse("A"), Word.parse("b"))
    with pytest.raises(ValueError):
        build_wicks_torus(Word.parse("ab"), Word.parse("B"), Word.parse("c"))
    with pytest.raises(ValueError):
        # cancellation only across the wrap-around junction
        build_wicks_torus(Word.parse("a"), Word(), Word.parse("a"))


def test_validate_diagram_accepts_labeled_square():
    m = mapzoo.square_town_map(labels=mapzoo.labeled_square_diagram_labels())
    relators = symmetrize(Presentation(2, [Word.parse("abAB")]))
    report = validate_diagram(VanKampenTorusDiagram(m, relators, 0))
    assert report.ok
    assert report.findings == ()


def test_validate_diagram_findings():
    relators = symmetrize(Presentation(2, [Word.parse("abAB")]))

    bad_labels = dict(mapzoo.labeled_square_diagram_labels())
    bad_labels.update({5: 1, 11: 1, 9: 2, 7: 2})
    m = mapzoo.square_town_map(labels=bad_labels)
    report = validate_diagram(VanKampenTorusDiagram(m, relators, 0))
    assert not report.ok
    assert any("not a relator" in f for f in report.findings)

    m = mapzoo.square_town_map(labels={0: 1, 2: 2})
    report = validate_diagram(VanKampenTorusDiagram(m, relators, 0))
    assert any("unlabeled" in f for f in report.findings)

    unreduced = SurfaceMap(
        [(0, 2, 1, 3)], [(0, 1), (2, 3)], labels={0: 1, 2: 1}, holes={0}
    )
    report = validate_diagram(VanKampenTorusDiagram(unreduced, relators, 0))
    assert any("not cyclically reduced" in f for f in report.findings)

    sphere = mapzoo.tetrahedron(holes={0})
    report = validate_diagram(VanKampenTorusDiagram(sphere, relators, 0))
    assert any("Euler characteristic" in f for f in report.findings)

    no_hole = mapzoo.torus_rose()
    report = validate_diagram(VanKampenTorusDiagram(no_hole, relators, 0))
    assert any("holes" in f for f in report.findings)


def test_map_file_round_trip():
    m = mapzoo.square_town_map(labels=mapzoo.labeled_square_diagram_labels())
    text = dump_map(m)
    again = parse_map(text)
    assert again.rotations == m.rotations
    assert again.pairing == m.pairing
    assert again.labels == m.labels
    assert again.holes == m.holes

    literal = """
    # a one-vertex torus with both loops labeled
    vertex 0 2 1 3
    edge 0 1
    edge 2 3
    label 0 a
    label 2 b
    hole 0
    """
    m = parse_map(literal)
    assert m.face_count == 1
    assert m.labels == {0: 1, 1: -1, 2: 2, 3: -2}
    assert m.holes == frozenset({0})


def test_map_file_errors():
    with pytest.raises(ValueError, match="line 1"):
        parse_map("edge 1\n")
    with pytest.raises(ValueError, match="single letter"):
        parse_map("vertex 0 1\nedge 0 1\nlabel 0 ab\n")
    with pytest.raises(ValueError, match="unknown directive"):
        parse_map("vertx 0 1\n")
    with pytest.raises(ValueError):
        parse_map("vertex 0 1\nedge 0 1\nhole 4\n")
