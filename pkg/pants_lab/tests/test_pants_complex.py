"""
Tests unitaires pour le graphe des pantalons: sommets, arêtes, distances, commutations et d_Q.
"""

import random
from itertools import combinations, product

import pytest

from pants_lab.topology.errors import CatalogError, InvalidCoordinatesError
from pants_lab.topology.farey import INFINITY, Slope
from pants_lab.topology.lamination_engine import (
    CurveCoords,
    SurfaceSpec,
    components,
    curve_enclosing,
    intersection_number,
    round_curve,
)
from pants_lab.topology.pants_complex import (
    NOT_COMMUTING,
    UNREACHABLE,
    CurveCatalog,
    MulticurveQ,
    PantsVertex,
    all_min_paths,
    build_catalog,
    catalog_distance,
    commutation_closure,
    commute_adjacent_moves,
    complementary_windows,
    dq_distance,
    edge_between,
    enumerate_curves,
    flat_embedding,
    is_elementary_edge,
    make_vertex,
    neighbors_in_catalog,
    pants_vertices,
    path_support,
    subsurface_distance,
    window_coordinates,
    window_curves,
)

S5 = SurfaceSpec(5)
S6 = SurfaceSpec(6)


@pytest.fixture(scope="module")
def catalog_s5():
    return build_catalog(S5, 1)


@pytest.fixture
def r5():
    return {
        "12": round_curve(S5, 1, 2),
        "23": round_curve(S5, 2, 3),
        "34": round_curve(S5, 3, 4),
        "123": round_curve(S5, 1, 3),
        "234": round_curve(S5, 2, 4),
    }


@pytest.fixture
def r6():
    return {
        "12": round_curve(S6, 1, 2),
        "23": round_curve(S6, 2, 3),
        "45": round_curve(S6, 4, 5),
        "123": round_curve(S6, 1, 3),
        "1234": round_curve(S6, 1, 4),
        "13": curve_enclosing(S6, [1, 3]),
    }


@pytest.fixture
def path_s6(r6):
    """Deux mouvements dans des fenêtres disjointes"""
    nu0 = PantsVertex(S6, (r6["12"], r6["45"], r6["123"]))
    nu1 = PantsVertex(S6, (r6["23"], r6["45"], r6["123"]))
    nu2 = PantsVertex(S6, (r6["23"], r6["1234"], r6["123"]))
    return nu0, nu1, nu2


def test_pants_vertex_validation(r5):
    """Teste le nombre de courbes et les répétitions"""
    with pytest.raises(InvalidCoordinatesError):
        PantsVertex(S5, (r5["12"],))
    with pytest.raises(InvalidCoordinatesError):
        PantsVertex(S5, (r5["12"], r5["12"]))
    vertex = PantsVertex(S5, (r5["34"], r5["12"]))
    assert vertex.curves == tuple(sorted((r5["12"], r5["34"])))
    assert vertex.contains([r5["12"]])


def test_make_vertex_rejette_courbes_secantes(r5):
    """Teste la vérification de disjonction"""
    assert make_vertex(S5, [r5["12"], r5["123"]]).curves
    with pytest.raises(InvalidCoordinatesError):
        make_vertex(S5, [r5["12"], r5["23"]])


def test_elementary_edge(r5):
    """Teste les mouvements élémentaires"""
    u = PantsVertex(S5, (r5["12"], r5["34"]))
    v = PantsVertex(S5, (r5["12"], r5["123"]))
    w = PantsVertex(S5, (r5["123"], r5["23"]))
    assert is_elementary_edge(u, v)
    assert not is_elementary_edge(u, u)
    assert not is_elementary_edge(u, w)
    edge = edge_between(u, v)
    assert edge.removed == r5["34"]
    assert edge.added == r5["123"]


def test_multicurve_q(r5):
    """Teste la construction des multicourbes standard"""
    Q = MulticurveQ.standard(S5, [[1, 2]])
    assert Q.is_standard
    assert Q.curves == (r5["12"],)
    assert len(Q.windows) == 1
    with pytest.raises(InvalidCoordinatesError):
        MulticurveQ.standard(S5, [[1, 3]])
    with pytest.raises(InvalidCoordinatesError):
        MulticurveQ.standard(S6, [[1, 2]])


def test_enumerate_curves_contient_les_courbes_rondes(r5):
    """Teste l'énumération de norme 1"""
    curves = enumerate_curves(S5, 1)
    assert set(r5.values()) <= set(curves)
    assert curves == sorted(curves, key=lambda c: (c.norm, c.vector))


def test_build_catalog_norme_invalide():
    """Teste le rejet d'une borne de norme nulle"""
    with pytest.raises(InvalidCoordinatesError):
        build_catalog(S5, 0)


def test_catalogue(catalog_s5, r5):
    """Teste les intersections et les voisins du catalogue"""
    assert catalog_s5.intersection(r5["12"], r5["23"]) == 2
    assert catalog_s5.intersection(r5["12"], r5["34"]) == 0
    u = PantsVertex(S5, (r5["12"], r5["34"]))
    v = PantsVertex(S5, (r5["12"], r5["123"]))
    assert v in neighbors_in_catalog(u, catalog_s5)
    vertices = pants_vertices(catalog_s5, [r5["12"]])
    assert u in vertices and v in vertices
    assert all(vertex.contains([r5["12"]]) for vertex in vertices)


def test_catalogue_courbe_absente(catalog_s5):
    """Teste l'erreur sur une courbe hors catalogue"""
    outside = next(c for c in enumerate_curves(S5, 2) if c.norm == 2)
    with pytest.raises(CatalogError):
        catalog_s5.position(outside)


def test_catalog_distance(catalog_s5, r5):
    """Teste la distance BFS"""
    u = PantsVertex(S5, (r5["12"], r5["34"]))
    v = PantsVertex(S5, (r5["12"], r5["123"]))
    w = PantsVertex(S5, (r5["123"], r5["23"]))
    assert catalog_distance(u, u, catalog_s5) == 0
    assert catalog_distance(u, v, catalog_s5) == 1
    assert catalog_distance(u, w, catalog_s5) == 2
    assert catalog_distance(w, u, catalog_s5) == 2


def test_catalog_distance_inaccessible(r5):
    """Deux sommets sans chemin dans un catalogue sans arête"""
    catalog = CurveCatalog(S5, 1, (r5["12"], r5["34"], r5["123"]), {})
    u = PantsVertex(S5, (r5["12"], r5["34"]))
    v = PantsVertex(S5, (r5["12"], r5["123"]))
    assert catalog_distance(u, u, catalog) == 0
    assert catalog_distance(u, v, catalog) is UNREACHABLE
    with pytest.raises(CatalogError):
        all_min_paths(u, v, catalog, cap=5)


def test_all_min_paths(catalog_s5, r5):
    """Teste l'énumération des géodésiques du catalogue"""
    u = PantsVertex(S5, (r5["12"], r5["34"]))
    w = PantsVertex(S5, (r5["123"], r5["23"]))
    paths, complete = all_min_paths(u, w, catalog_s5, cap=100)
    assert complete
    assert paths
    for path in paths:
        assert len(path) == 3
        assert path[0] == u and path[-1] == w
        assert all(is_elementary_edge(a, b, catalog_s5) for a, b in zip(path, path[1:]))
    assert all_min_paths(u, u, catalog_s5, cap=1) == ({(u,)}, True)
    with pytest.raises(ValueError):
        all_min_paths(u, w, catalog_s5, cap=0)


def test_commutation_dans_des_fenetres_disjointes(path_s6, r6):
    """Teste la commutation de deux mouvements qui ne se chevauchent pas"""
    nu0, nu1, nu2 = path_s6
    swapped = commute_adjacent_moves(path_s6, 1)
    assert swapped == (nu0, PantsVertex(S6, (r6["12"], r6["123"], r6["1234"])), nu2)
    assert commute_adjacent_moves(swapped, 1) == path_s6


def test_commutation_refusee(path_s6, r6):
    """Deux mouvements dans la même fenêtre ne commutent pas"""
    nu0, nu1, _ = path_s6
    back = (nu0, nu1, nu0)
    assert commute_adjacent_moves(back, 1) is NOT_COMMUTING
    other = PantsVertex(S6, (r6["13"], r6["45"], r6["123"]))
    assert commute_adjacent_moves((nu0, nu1, other), 1) is NOT_COMMUTING
    with pytest.raises(IndexError):
        commute_adjacent_moves(path_s6, 0)


def test_commutation_closure(path_s6):
    """Teste la fermeture par commutations"""
    variants, complete = commutation_closure(path_s6)
    assert complete
    assert len(variants) == 2
    assert variants[0] == path_s6


def test_path_support(path_s6, r6):
    """Teste le support d'un chemin et ses fenêtres"""
    support = path_support(path_s6)
    assert support.curves == frozenset({r6["123"]})
    assert len(support.windows) == 2
    assert support.complexities == (1, 1)


def test_complementary_windows(r6):
    """Teste les régions d'une décomposition complète: que des pantalons"""
    regions = complementary_windows(S6, [r6["12"], r6["45"], r6["123"]])
    assert len(regions) == 4
    assert all(len(items) == 2 for _, items in regions)
    assert regions[0] == (None, (frozenset({1, 2, 3}), frozenset({4, 5})))


def test_dq_distance(path_s6, r6):
    """Teste les coordonnées de fenêtre et d_Q"""
    nu0, nu1, nu2 = path_s6
    Q = MulticurveQ.standard(S6, [[1, 2, 3]])
    assert window_curves(nu0, Q) == [r6["45"], r6["12"]]
    assert window_coordinates(nu0, Q) == (INFINITY, Slope(0, 1))
    assert window_coordinates(nu2, Q) == (Slope(0, 1), INFINITY)
    assert dq_distance(nu0, nu0, Q) == 0
    assert dq_distance(nu0, nu1, Q) == 1
    assert dq_distance(nu0, nu2, Q) == 2


def test_dq_distance_hors_de_p_q(r6):
    """Un sommet sans Q n'a pas de coordonnées"""
    Q = MulticurveQ.standard(S6, [[1, 2, 3]])
    outside = PantsVertex(S6, (r6["12"], r6["45"], r6["1234"]))
    with pytest.raises(InvalidCoordinatesError):
        window_coordinates(outside, Q)


def test_subsurface_distance(path_s6):
    """Sur P_Q, d_Y coïncide avec d_Q"""
    nu0, _, nu2 = path_s6
    Q = MulticurveQ.standard(S6, [[1, 2, 3]])
    assert subsurface_distance(nu0, nu0, Q) == 0
    assert subsurface_distance(nu0, nu2, Q) == dq_distance(nu0, nu2, Q) == 2


def test_subsurface_distance_multicourbe_deplacee(path_s6):
    """d_Y demande une multicourbe standard"""
    Q = MulticurveQ(S6, ((1, 3),), (1,))
    assert not Q.is_standard
    with pytest.raises(InvalidCoordinatesError):
        subsurface_distance(path_s6[0], path_s6[0], Q)


def test_flat_embedding(r6):
    """Teste l'image de la grille Z^2 dans P_Q"""
    Q = MulticurveQ.standard(S6, [[1, 2, 3]])
    assert flat_embedding(Q, (0, 0)) == PantsVertex(S6, (r6["12"], r6["123"], r6["1234"]))
    assert flat_embedding(Q, (1, 1)) == PantsVertex(S6, (r6["23"], r6["45"], r6["123"]))
    assert dq_distance(flat_embedding(Q, (-1, 2)), flat_embedding(Q, (1, 0)), Q) == 4
    with pytest.raises(InvalidCoordinatesError):
        flat_embedding(Q, (0,))


def test_window_coordinates_sigma05(r5):
    """Teste les coordonnées d'une fenêtre unique"""
    Q = MulticurveQ.standard(S5, [[1, 2]])
    u = PantsVertex(S5, (r5["12"], r5["123"]))
    assert window_coordinates(u, Q) == (Slope(0, 1),)
    assert window_coordinates(PantsVertex(S5, (r5["12"], r5["34"])), Q) == (INFINITY,)
    with pytest.raises(InvalidCoordinatesError):
        window_curves(PantsVertex(S5, (r5["23"], r5["123"])), Q)


@pytest.fixture(scope="module")
def catalog_s5_norm2():
    return build_catalog(S5, 2)


@pytest.fixture(scope="module")
def grid_s6():
    """Plongement de la grille {-3..3}^2 pour Q = {1,2,3} et le catalogue de ses courbes"""
    Q = MulticurveQ.standard(S6, [[1, 2, 3]])
    grid = {x: flat_embedding(Q, x) for x in product(range(-3, 4), repeat=2)}
    curves = sorted({c for u in grid.values() for c in u.curves})
    matrix = {}
    for i, j in combinations(range(len(curves)), 2):
        value = intersection_number(curves[i], curves[j])
        if value:
            matrix[(i, j)] = value
    return Q, grid, CurveCatalog(S6, 1, tuple(curves), matrix)


def disjoint_diagram(a, b):
    """Vrai si le vecteur somme se reconstruit en exactement deux composantes a et b"""
    total = tuple(x + y for x, y in zip(a.vector, b.vector))
    try:
        parts = components(CurveCoords(a.surface, total))
    except InvalidCoordinatesError:
        return False
    return sorted(c for c, _ in parts) == sorted([a, b])


def test_intersection_nulle_ssi_diagramme_disjoint(catalog_s5_norm2):
    """i(a, b) = 0 exactement quand les vecteurs s'additionnent en une multicourbe {a, b}"""
    catalog = catalog_s5_norm2
    disjoint_pairs = 0
    for a, b in combinations(catalog.curves, 2):
        zero = catalog.intersection(a, b) == 0
        assert zero == disjoint_diagram(a, b), (a, b)
        disjoint_pairs += zero
    assert disjoint_pairs > 0


def test_matrice_du_catalogue(catalog_s5_norm2):
    """La matrice est symétrique, de diagonale nulle, et coïncide avec intersection_number"""
    catalog = catalog_s5_norm2
    assert all(i < j and value > 0 for (i, j), value in catalog.matrix.items())
    for c in catalog.curves:
        assert catalog.intersection(c, c) == 0
    rng = random.Random(2)
    pairs = list(combinations(catalog.curves, 2))
    for a, b in rng.sample(pairs, min(300, len(pairs))):
        assert catalog.intersection(a, b) == catalog.intersection(b, a)
        assert intersection_number(a, b) == intersection_number(b, a) == catalog.intersection(a, b)


def test_intersection_symetrique_sur_sigma06():
    """Teste la symétrie de intersection_number sur des courbes de Sigma_0,6"""
    curves = enumerate_curves(S6, 1)
    rng = random.Random(4)
    for a, b in rng.sample(list(combinations(curves, 2)), 200):
        assert intersection_number(a, b) == intersection_number(b, a)


def test_is_elementary_edge_symetrique(catalog_s5):
    """Teste la symétrie des arêtes et leur accord avec les voisins du catalogue"""
    vertices = pants_vertices(catalog_s5)
    for u, v in combinations(vertices, 2):
        edge = is_elementary_edge(u, v, catalog_s5)
        assert edge == is_elementary_edge(v, u, catalog_s5)
        assert edge == (v in neighbors_in_catalog(u, catalog_s5))
        assert edge == is_elementary_edge(u, v)


def test_dq_distance_axiomes_metriques(grid_s6):
    """Teste les axiomes de distance de d_Q sur des triplets tirés au hasard"""
    Q, grid, _ = grid_s6
    vertices = list(grid.values())
    rng = random.Random(5)
    for _ in range(500):
        u, v, w = (rng.choice(vertices) for _ in range(3))
        assert dq_distance(u, u, Q) == 0
        assert dq_distance(u, v, Q) == dq_distance(v, u, Q)
        assert (dq_distance(u, v, Q) == 0) == (u == v)
        assert dq_distance(u, w, Q) <= dq_distance(u, v, Q) + dq_distance(v, w, Q)


def test_subsurface_distance_inegalite_triangulaire(catalog_s5):
    """Teste d_Y(u, w) <= d_Y(u, v) + d_Y(v, w) hors de P_Q"""
    Q = MulticurveQ.standard(S5, [[1, 2]])
    vertices = pants_vertices(catalog_s5)
    rng = random.Random(6)
    for _ in range(300):
        u, v, w = (rng.choice(vertices) for _ in range(3))
        assert subsurface_distance(u, u, Q) == 0
        assert subsurface_distance(u, w, Q) <= subsurface_distance(u, v, Q) + subsurface_distance(v, w, Q)


def test_commutations_aleatoires(grid_s6):
    """Sur 1000 sous-chemins commutables: extrémités, support et involution préservés"""
    _, grid, catalog = grid_s6
    rng = random.Random(8)
    for _ in range(1000):
        x = (rng.randint(-2, 2), rng.randint(-2, 2))
        first = rng.randrange(2)
        steps = [(rng.choice((-1, 1)), first), (rng.choice((-1, 1)), 1 - first)]
        y = list(x)
        y[steps[0][1]] += steps[0][0]
        z = list(y)
        z[steps[1][1]] += steps[1][0]
        other = list(x)
        other[steps[1][1]] += steps[1][0]
        path = (grid[x], grid[tuple(y)], grid[tuple(z)])

        swapped = commute_adjacent_moves(path, 1, catalog)

        assert swapped is not NOT_COMMUTING
        assert swapped[0] == path[0] and swapped[2] == path[2]
        assert swapped[1] == grid[tuple(other)]
        support = path_support(path)
        assert path_support(swapped) == support
        assert support.curves <= set(swapped[1].curves)
        assert commute_adjacent_moves(swapped, 1, catalog) == path


def test_commutations_refusees_dans_une_meme_fenetre(grid_s6):
    """Deux pas dans la même fenêtre ne commutent jamais"""
    _, grid, catalog = grid_s6
    rng = random.Random(9)
    for _ in range(200):
        axis, sign = rng.randrange(2), rng.choice((-1, 1))
        x = [rng.randint(-1, 1), rng.randint(-1, 1)]
        y, z = list(x), list(x)
        y[axis] += sign
        z[axis] += 2 * sign
        path = (grid[tuple(x)], grid[tuple(y)], grid[tuple(z)])
        assert commute_adjacent_moves(path, 1, catalog) is NOT_COMMUTING
