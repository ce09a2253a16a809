"""
Tests unitaires pour les audits de convexité, des plats et lipschitzien.
"""

from itertools import combinations
from unittest.mock import MagicMock, patch

import pandas as pd
import pytest

from pants_lab.topology.audits import (
    CORROBORATED_CAPPED,
    CORROBORATED_COMPLETE,
    INCOMPLETE,
    REFUTED,
    AuditReport,
    _stratified_sample,
    convexity_audit,
    flat_audit,
    flat_curves,
    lipschitz_audit,
    lipschitz_witness,
    q_label,
)
from pants_lab.topology.errors import CatalogError, LabConfigError, NotInWindowError
from pants_lab.topology.farey import INFINITY, Slope
from pants_lab.topology.lamination_engine import SurfaceSpec, curve_enclosing, round_curve
from pants_lab.topology.pants_complex import (
    CurveCatalog,
    MulticurveQ,
    PantsVertex,
    build_catalog,
    is_elementary_edge,
    make_vertex,
    subsurface_distance,
)
from pants_lab.topology.window_frames import window_slope
from pants_lab.topology.window_models import WindowCurve, WindowKind, window_intersection

S5 = SurfaceSpec(5)
S6 = SurfaceSpec(6)


def window_catalog(Q, grid_radius):
    """
    Catalogue réduit à Q et aux courbes de fenêtre de la grille; la matrice est lue dans les
    fenêtres (2|det| dans une même fenêtre, 0 entre fenêtres et avec Q).
    """
    curves = list(Q.curves) + flat_curves(Q, grid_radius)
    owner = {}
    for c in curves[len(Q.curves):]:
        for index, window in enumerate(Q.windows):
            try:
                owner[c] = (index, window_slope(c, window))
            except NotInWindowError:
                continue
    matrix = {}
    for i, j in combinations(range(len(curves)), 2):
        a, b = owner.get(curves[i]), owner.get(curves[j])
        if a is None or b is None or a[0] != b[0]:
            continue
        value = window_intersection(
            WindowCurve(WindowKind.FOUR_PUNCTURED_SPHERE, a[1]), WindowCurve(WindowKind.FOUR_PUNCTURED_SPHERE, b[1])
        )
        if value:
            matrix[(i, j)] = value
    return CurveCatalog(Q.surface, 1, tuple(curves), matrix)


@pytest.fixture(scope="module")
def q5():
    return MulticurveQ.standard(S5, [[1, 2]])


@pytest.fixture(scope="module")
def q6():
    return MulticurveQ.standard(S6, [[1, 2, 3]])


@pytest.fixture(scope="module")
def catalog_s5():
    return build_catalog(S5, 2)


def test_audit_report_verdict():
    """Teste l'agrégation des verdicts"""
    report = AuditReport("convexity", {})
    assert report.verdict == CORROBORATED_COMPLETE
    report.records = [{"verdict": CORROBORATED_COMPLETE}, {"verdict": CORROBORATED_CAPPED}]
    assert report.verdict == CORROBORATED_CAPPED
    report.records.append({"verdict": INCOMPLETE})
    assert report.verdict == INCOMPLETE
    report.records.append({"verdict": REFUTED})
    assert report.verdict == REFUTED
    summary = report.summary()
    assert summary["records"] == 4
    assert summary["refutations"] == 1
    assert summary["incomplete"] == 1
    assert summary["capped"] == 1


def test_audit_report_incomplet_sans_records():
    """Un audit tronqué est au mieux plafonné"""
    report = AuditReport("lipschitz", {}, [{"verdict": CORROBORATED_COMPLETE}], complete=False)
    assert report.verdict == CORROBORATED_CAPPED


def test_stratified_sample_deterministe():
    """Teste l'échantillonnage stratifié par d_Q"""
    frame = pd.DataFrame({"u": range(40), "v": range(1, 41), "d_Q": [k % 4 for k in range(40)]})
    first = _stratified_sample(frame, 8, seed=3)
    second = _stratified_sample(frame, 8, seed=3)
    assert len(first) == 8
    assert first.equals(second)
    assert set(first["d_Q"]) == {0, 1, 2, 3}
    assert len(_stratified_sample(frame.head(5), 8, seed=0)) == 5


def test_q_label(q6):
    """Teste l'étiquette de Q"""
    assert q_label(q6) == "1,3"
    assert q_label(MulticurveQ.standard(SurfaceSpec(7), [[1, 2, 3], [4, 5]])) == "1,3;4,5"


def test_convexity_audit_corrobore(q5):
    """Teste l'audit de convexité sur un catalogue réduit à P_Q"""
    catalog = window_catalog(q5, 2)
    report = convexity_audit(S5, q5, catalog, pair_budget=20, length_budget=4, seed=0, cap=10)
    assert report.kind == "convexity"
    assert report.records
    assert report.verdict == CORROBORATED_COMPLETE
    for record in report.records:
        assert record["catalog_distance"] == record["d_Q"]
        assert record["all_in_PQ"] is True
        assert record["paths_enumerated"] == 1


def test_convexity_audit_refute_un_raccourci(q5):
    """Un chemin du catalogue plus court que d_Q réfute"""
    u = PantsVertex(S5, (round_curve(S5, 1, 2), round_curve(S5, 3, 4)))
    v = PantsVertex(S5, (round_curve(S5, 1, 2), round_curve(S5, 1, 3)))
    catalog = MagicMock(surface=S5, norm_bound=1)
    coordinates = {u: (INFINITY,), v: (Slope(2, 5),)}
    with patch("pants_lab.topology.audits.pants_vertices", return_value=[u, v]), \
         patch("pants_lab.topology.audits.window_coordinates", side_effect=lambda w, Q: coordinates[w]), \
         patch("pants_lab.topology.audits.catalog_distance", return_value=2):
        report = convexity_audit(S5, q5, catalog, pair_budget=5, length_budget=4)
    assert report.verdict == REFUTED
    assert report.records[0]["d_Q"] == 3
    assert report.records[0]["catalog_distance"] == 2


def test_convexity_audit_chemin_hors_de_p_q(q5):
    """Une géodésique minimale qui quitte P_Q réfute"""
    r12, r34, r123, r23 = (round_curve(S5, 1, 2), round_curve(S5, 3, 4), round_curve(S5, 1, 3), round_curve(S5, 2, 3))
    u = PantsVertex(S5, (r12, r34))
    v = PantsVertex(S5, (r12, r123))
    detour = PantsVertex(S5, (r23, r123))
    catalog = MagicMock(surface=S5, norm_bound=1)
    coordinates = {u: (INFINITY,), v: (Slope(0, 1),)}
    with patch("pants_lab.topology.audits.pants_vertices", return_value=[u, v]), \
         patch("pants_lab.topology.audits.window_coordinates", side_effect=lambda w, Q: coordinates[w]), \
         patch("pants_lab.topology.audits.catalog_distance", return_value=1), \
         patch("pants_lab.topology.audits.all_min_paths", return_value=({(u, detour)}, True)):
        report = convexity_audit(S5, q5, catalog, pair_budget=5, length_budget=4)
    assert report.records[0]["all_in_PQ"] is False
    assert report.verdict == REFUTED


def test_convexity_audit_echantillon_vide(q5):
    """Teste l'erreur quand P_Q ne rencontre pas le catalogue"""
    catalog = MagicMock(surface=S5, norm_bound=1)
    with patch("pants_lab.topology.audits.pants_vertices", return_value=[]):
        with pytest.raises(CatalogError):
            convexity_audit(S5, q5, catalog, pair_budget=5, length_budget=4)


def test_flat_audit_corrobore(q6):
    """Teste l'audit des plats sur la grille {-1, 0, 1}^2"""
    catalog = window_catalog(q6, 1)
    report = flat_audit(S6, q6, catalog, grid_radius=1)
    assert len(report.records) == 45
    assert report.verdict == CORROBORATED_COMPLETE
    assert all(record["catalog_distance"] == record["l1"] for record in report.records)


def test_flat_audit_rang_incorrect():
    """Teste le rejet d'une multicourbe qui n'atteint pas le rang"""
    Q = MulticurveQ.standard(S6, [[1, 2], [4, 5]])
    assert len(Q.windows) == 1
    with pytest.raises(LabConfigError):
        flat_audit(S6, Q, MagicMock(), grid_radius=1)


def test_flat_audit_rayon_negatif(q5):
    """Teste le rejet d'un rayon de grille négatif"""
    with pytest.raises(LabConfigError):
        flat_audit(S5, q5, window_catalog(q5, 1), grid_radius=-1)


def test_flat_audit_grille_hors_catalogue(q6):
    """Teste l'erreur quand la grille dépasse le catalogue"""
    catalog = window_catalog(q6, 1)
    with pytest.raises(CatalogError):
        flat_audit(S6, q6, catalog, grid_radius=2)


def test_lipschitz_audit_corrobore(q5):
    """Sur la grille de P_Q, tout chemin a un témoin d_Y(nu_0, nu_q) <= q"""
    catalog = window_catalog(q5, 2)
    report = lipschitz_audit(S5, q5, catalog, path_length=2, path_budget=20, seed=0, starts=2)
    assert report.kind == "lipschitz"
    assert report.records
    assert report.verdict in (CORROBORATED_COMPLETE, CORROBORATED_CAPPED)
    for record in report.records:
        assert record["verdict"] == CORROBORATED_COMPLETE
        assert record["start_in_PQ"] is True
        assert 1 <= record["witness_q"] <= record["path_length"]


def test_lipschitz_audit_departs_dans_et_hors_de_p_q(q5, catalog_s5):
    """Les départs sont tirés dans P_Q et hors de P_Q, sans réfutation"""
    report = lipschitz_audit(S5, q5, catalog_s5, path_length=3, path_budget=60, seed=0, starts=4)
    assert {record["start_in_PQ"] for record in report.records} == {True, False}
    assert report.summary()["refutations"] == 0
    for record in report.records:
        assert record["verdict"] == CORROBORATED_COMPLETE
        # une seule courbe de Q borde la fenêtre: les arcs sont des vagues de même base
        assert record["witness_q"] == 1


def test_lipschitz_audit_meme_graine_meme_rapport(q5, catalog_s5):
    """Teste le déterminisme de l'échantillon de départs"""
    first = lipschitz_audit(S5, q5, catalog_s5, path_length=2, path_budget=12, seed=5, starts=4)
    second = lipschitz_audit(S5, q5, catalog_s5, path_length=2, path_budget=12, seed=5, starts=4)
    assert first.records == second.records


def test_lipschitz_audit_temoin_au_second_pas(q5):
    """Quand d_Y(nu_0, nu_1) vaut 2, le témoin est pris en q = 2"""
    catalog = window_catalog(q5, 2)
    with patch("pants_lab.topology.audits.subsurface_distance", return_value=2):
        report = lipschitz_audit(S5, q5, catalog, path_length=2, path_budget=10, starts=2)
    assert report.records
    for record in report.records:
        assert record["witness_q"] == 2
        assert record["witness_variant"] == 0


def test_lipschitz_audit_refute_sans_temoin(q5):
    """Sans témoin et avec une fermeture complète, le chemin réfute"""
    catalog = window_catalog(q5, 2)
    with patch("pants_lab.topology.audits.subsurface_distance", return_value=5):
        report = lipschitz_audit(S5, q5, catalog, path_length=2, path_budget=10, starts=2)
    assert report.verdict == REFUTED
    assert all(record["witness_q"] is None for record in report.records)


def test_lipschitz_witness_coutures_de_memes_extremites():
    """Deux coutures de mêmes extrémités: d_Y(nu_0, nu_1) = 2 et le témoin est q = 2"""
    Q = MulticurveQ.standard(S6, [[1, 2], [4, 5]])
    arch24, arch15 = curve_enclosing(S6, [2, 4]), curve_enclosing(S6, [1, 5])
    arch1245 = curve_enclosing(S6, [1, 2, 4, 5])
    nu0 = make_vertex(S6, [arch24, round_curve(S6, 2, 4), arch15])
    nu1 = make_vertex(S6, [arch24, arch1245, arch15])
    nu2 = make_vertex(S6, [arch24, arch1245, curve_enclosing(S6, [1, 2, 4])])
    assert is_elementary_edge(nu0, nu1)
    assert subsurface_distance(nu0, nu1, Q) == 2

    witness, variants_checked, closed = lipschitz_witness((nu0, nu1, nu2), Q)

    assert witness == (2, 0)
    assert variants_checked >= 1
    assert closed


def test_lipschitz_audit_chemin_trop_court(q5):
    """Teste le rejet d'une longueur inférieure à chi_bar(Y)"""
    catalog = window_catalog(q5, 1)
    with pytest.raises(LabConfigError):
        lipschitz_audit(S5, q5, catalog, path_length=1, path_budget=5)


def test_stratified_sample_par_strate_booleenne():
    """Teste l'échantillonnage des départs selon l'appartenance à P_Q"""
    frame = pd.DataFrame({"index": range(30), "in_PQ": [k < 3 for k in range(30)]})
    sample = _stratified_sample(frame, 4, seed=1, by="in_PQ", order=("index",))
    assert len(sample) == 4
    assert set(sample["in_PQ"]) == {True, False}
    assert list(sample["index"]) == sorted(sample["index"])
