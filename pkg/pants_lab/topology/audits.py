"""
Audits de falsification: convexité de P_Q, plats Z^r et projection lipschitzienne après commutation.

Les distances du catalogue sont des majorants des vraies distances: un chemin strictement plus
court réfute, une égalité ne fait que corroborer.
"""

import math
from itertools import product
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from dagster import get_dagster_logger

from pants_lab.topology.errors import CatalogError, LabConfigError
from pants_lab.topology.farey import bi_infinite_geodesic, distance as farey_distance, rank
from pants_lab.topology.lamination_engine import CurveCoords, SurfaceSpec
from pants_lab.topology.pants_complex import (
    UNREACHABLE,
    CurveCatalog,
    MulticurveQ,
    PantsVertex,
    _bfs,
    all_min_paths,
    build_catalog,
    catalog_distance,
    commutation_closure,
    flat_embedding,
    pants_vertices,
    subsurface_distance,
    window_coordinates,
)
from pants_lab.topology.window_frames import curve_with_window_slope
from pants_lab.topology.window_models import WindowKind, window_chi_bar

logger = get_dagster_logger()

CORROBORATED_COMPLETE = "corroborated-complete"
CORROBORATED_CAPPED = "corroborated-capped"
REFUTED = "refuted"
INCOMPLETE = "incomplete"


@dataclass
class AuditReport:
    kind: str
    parameters: Dict[str, Any]
    records: List[Dict[str, Any]] = field(default_factory=list)
    complete: bool = True

    @property
    def verdict(self) -> str:
        verdicts = {record["verdict"] for record in self.records}
        if REFUTED in verdicts:
            return REFUTED
        if INCOMPLETE in verdicts:
            return INCOMPLETE
        if CORROBORATED_CAPPED in verdicts or not self.complete:
            return CORROBORATED_CAPPED
        return CORROBORATED_COMPLETE

    def summary(self) -> Dict[str, Any]:
        counts = pd.Series([record["verdict"] for record in self.records], dtype="object").value_counts()
        return {
            "records": len(self.records),
            "refutations": int(counts.get(REFUTED, 0)),
            "incomplete": int(counts.get(INCOMPLETE, 0)),
            "capped": int(counts.get(CORROBORATED_CAPPED, 0)),
            "complete": self.complete,
            "verdict": self.verdict,
        }


def vertex_payload(u: PantsVertex) -> List[List[int]]:
    return [list(c.vector) for c in u.curves]


def q_label(Q: MulticurveQ) -> str:
    return ";".join(f"{s},{t}" for s, t in Q.intervals)


def _stratified_sample(
    frame: pd.DataFrame,
    budget: int,
    seed: int,
    by: str = "d_Q",
    order: Tuple[str, ...] = ("d_Q", "u", "v"),
) -> pd.DataFrame:
    """
    Échantillon déterministe, réparti également entre les strates de la colonne `by`.
    """
    if len(frame) <= budget:
        return frame.sort_values(list(order)).reset_index(drop=True)
    quota = math.ceil(budget / frame[by].nunique())
    sampled = frame.groupby(by, group_keys=False).apply(
        lambda stratum: stratum.sample(n=min(len(stratum), quota), random_state=seed)
    )
    return sampled.sort_values(list(order)).head(budget).reset_index(drop=True)


def convexity_audit(
    surface: SurfaceSpec,
    Q: MulticurveQ,
    catalog: CurveCatalog,
    pair_budget: int,
    length_budget: int,
    seed: int = 0,
    cap: int = 1000,
) -> AuditReport:
    """
    Pour chaque paire échantillonnée de P_Q: distance du catalogue égale à d_Q et géodésiques
    minimales du catalogue contenues dans P_Q.
    """
    if Q.surface != surface or catalog.surface != surface:
        raise LabConfigError("Q, catalogue et surface ne concordent pas")
    vertices = pants_vertices(catalog, Q.curves)
    logger.info(f"P_Q dans le catalogue: {len(vertices)} sommets")
    coordinates = {u: window_coordinates(u, Q) for u in vertices}

    rows = []
    for i, u in enumerate(vertices):
        for j in range(i + 1, len(vertices)):
            d_q = sum(farey_distance(a, b) for a, b in zip(coordinates[u], coordinates[vertices[j]]))
            if d_q <= length_budget:
                rows.append({"u": i, "v": j, "d_Q": d_q})
    if not rows:
        logger.error("Échantillon vide pour l'audit de convexité")
        raise CatalogError("Aucune paire de P_Q avec d_Q dans le budget")
    sample = _stratified_sample(pd.DataFrame(rows), pair_budget, seed)
    logger.info(f"{len(sample)} paires échantillonnées sur {len(rows)}")

    report = AuditReport(
        "convexity",
        {
            "punctures": surface.punctures,
            "q": q_label(Q),
            "norm_bound": catalog.norm_bound,
            "pair_budget": pair_budget,
            "length_budget": length_budget,
            "seed": seed,
            "cap": cap,
        },
    )
    q_curves = set(Q.curves)
    for row in sample.itertuples(index=False):
        u, v = vertices[row.u], vertices[row.v]
        record = {
            "endpoints": [vertex_payload(u), vertex_payload(v)],
            "d_Q": int(row.d_Q),
            "catalog_distance": None,
            "paths_enumerated": 0,
            "complete": False,
            "all_in_PQ": None,
        }
        length = catalog_distance(u, v, catalog)
        if length is UNREACHABLE:
            record["verdict"] = INCOMPLETE
        else:
            record["catalog_distance"] = length
            if length < row.d_Q:
                record["verdict"] = REFUTED
            elif length > row.d_Q:
                record["verdict"] = INCOMPLETE
            else:
                paths, complete = all_min_paths(u, v, catalog, cap)
                inside = all(q_curves <= set(w.curves) for path in paths for w in path)
                record.update(paths_enumerated=len(paths), complete=complete, all_in_PQ=inside)
                if not inside:
                    record["verdict"] = REFUTED
                else:
                    record["verdict"] = CORROBORATED_COMPLETE if complete else CORROBORATED_CAPPED
        if record["verdict"] == REFUTED:
            logger.warning(f"Réfutation: {u} -> {v} (d_Q = {row.d_Q}, catalogue = {length})")
        report.records.append(record)
    logger.info(f"Audit de convexité: {report.summary()}")
    return report


def flat_curves(Q: MulticurveQ, grid_radius: int) -> List[CurveCoords]:
    """Courbes de fenêtre nécessaires à la grille {-N..N}^r."""
    return [
        curve_with_window_slope(bi_infinite_geodesic(k), window)
        for window in Q.windows
        for k in range(-grid_radius, grid_radius + 1)
    ]


def flat_catalog(surface: SurfaceSpec, Q: MulticurveQ, norm_bound: int, grid_radius: int) -> CurveCatalog:
    """Catalogue de norme bornée complété par les courbes de la grille et celles de Q."""
    return build_catalog(surface, norm_bound, list(Q.curves) + flat_curves(Q, grid_radius))


def flat_audit(surface: SurfaceSpec, Q: MulticurveQ, catalog: CurveCatalog, grid_radius: int) -> AuditReport:
    """
    Vérifie catalog_distance(iota(x), iota(y)) = |x - y|_1 sur toute la grille {-N..N}^r.
    """
    windows = Q.windows
    expected_rank = rank(0, surface.punctures)
    if len(windows) != expected_rank:
        raise LabConfigError(f"Q a {len(windows)} fenêtres, le rang de Sigma_0,{surface.punctures} est {expected_rank}")
    if grid_radius < 0:
        raise LabConfigError(f"Rayon de grille négatif ({grid_radius})")
    grid = list(product(range(-grid_radius, grid_radius + 1), repeat=len(windows)))
    images = {x: flat_embedding(Q, x) for x in grid}
    for x, u in images.items():
        missing = [c for c in u.curves if c not in catalog.index]
        if missing:
            logger.error(f"La grille dépasse le catalogue en {x}")
            raise CatalogError(f"iota{x} utilise {len(missing)} courbes hors catalogue")

    report = AuditReport(
        "flat",
        {
            "punctures": surface.punctures,
            "q": q_label(Q),
            "norm_bound": catalog.norm_bound,
            "grid_radius": grid_radius,
            "rank": expected_rank,
        },
    )
    depth = 2 * grid_radius * len(windows)
    for i, x in enumerate(grid):
        layers = _bfs(catalog, catalog.key(images[x]), depth)
        for y in grid[i:]:
            l1 = sum(abs(a - b) for a, b in zip(x, y))
            reached = layers.get(catalog.key(images[y]))
            if reached is None:
                verdict = INCOMPLETE
            elif reached < l1:
                verdict = REFUTED
            elif reached > l1:
                verdict = INCOMPLETE
            else:
                verdict = CORROBORATED_COMPLETE
            report.records.append(
                {"x": list(x), "y": list(y), "l1": l1, "catalog_distance": reached, "verdict": verdict}
            )
    logger.info(f"Audit des plats: {report.summary()}")
    return report


def _simple_paths(start: PantsVertex, catalog: CurveCatalog, lengths: range, budget: int) -> Tuple[List[Tuple[PantsVertex, ...]], bool]:
    found: List[Tuple[int, ...]] = []
    stack = [(catalog.key(start),)]
    while stack:
        partial = stack.pop()
        if len(partial) - 1 in lengths:
            if len(found) >= budget:
                return [tuple(catalog.vertex(k) for k in path) for path in found], False
            found.append(partial)
        if len(partial) - 1 >= lengths.stop - 1:
            continue
        for following in reversed(catalog.neighbor_keys(partial[-1])):
            if following not in partial:
                stack.append(partial + (following,))
    return [tuple(catalog.vertex(k) for k in path) for path in found], True


def lipschitz_witness(
    path: Sequence[PantsVertex],
    Q: MulticurveQ,
    catalog: Optional[CurveCatalog] = None,
    closure_limit: int = 256,
    distances: Optional[Dict[PantsVertex, int]] = None,
) -> Tuple[Optional[Tuple[int, int]], int, bool]:
    """
    Premier couple (q, numéro de variante) avec d_Y(nu_0, nu_q) <= q, en parcourant les variantes
    obtenues par commutation dans l'ordre de la fermeture.

    Renvoie aussi le nombre de variantes et l'indicateur de fermeture complète. `distances` sert de
    cache pour un même sommet de départ.
    """
    start = path[0]
    if distances is None:
        distances = {}
    variants, closed = commutation_closure(path, catalog, closure_limit)
    for number, variant in enumerate(variants):
        for q in range(1, len(variant)):
            target = variant[q]
            if target not in distances:
                distances[target] = subsurface_distance(start, target, Q)
            if distances[target] <= q:
                return (q, number), len(variants), closed
    return None, len(variants), closed


def lipschitz_audit(
    surface: SurfaceSpec,
    Q: MulticurveQ,
    catalog: CurveCatalog,
    path_length: int,
    path_budget: int,
    seed: int = 0,
    starts: int = 4,
    closure_limit: int = 256,
) -> AuditReport:
    """
    Pour chaque chemin de longueur p >= chi_bar(Y) issu d'un sommet quelconque du catalogue, cherche
    une commutation et un indice 0 < q <= p avec d_Y(nu_0, nu_q) <= q.

    Les départs sont tirés des deux strates: sommets de P_Q et sommets qui ne contiennent pas Q.
    """
    if not Q.is_standard:
        raise LabConfigError("L'audit lipschitzien demande une multicourbe Q standard")
    threshold = sum(window_chi_bar(WindowKind.FOUR_PUNCTURED_SPHERE) for _ in Q.windows)
    if path_length < threshold:
        raise LabConfigError(f"Longueur de chemin {path_length} inférieure à chi_bar(Y) = {threshold}")
    vertices = pants_vertices(catalog)
    if not vertices:
        raise CatalogError("Le catalogue ne contient aucune décomposition en pantalons")
    frame = pd.DataFrame(
        {"index": range(len(vertices)), "in_PQ": [u.contains(Q.curves) for u in vertices]}
    )
    logger.info(f"Départs possibles: {int(frame['in_PQ'].sum())} dans P_Q, {int((~frame['in_PQ']).sum())} hors de P_Q")
    chosen = _stratified_sample(frame, starts, seed, by="in_PQ", order=("index",))

    report = AuditReport(
        "lipschitz",
        {
            "punctures": surface.punctures,
            "q": q_label(Q),
            "norm_bound": catalog.norm_bound,
            "path_length": path_length,
            "path_budget": path_budget,
            "seed": seed,
            "chi_bar": threshold,
        },
    )
    remaining = path_budget
    share = math.ceil(path_budget / len(chosen))
    for index, in_pq in zip(chosen["index"], chosen["in_PQ"]):
        start = vertices[index]
        if remaining <= 0:
            report.complete = False
            break
        paths, complete = _simple_paths(start, catalog, range(threshold, path_length + 1), min(share, remaining))
        remaining -= len(paths)
        report.complete = report.complete and complete
        distances: Dict[PantsVertex, int] = {}
        for path in paths:
            witness, variants_checked, closed = lipschitz_witness(path, Q, catalog, closure_limit, distances)
            if witness:
                verdict = CORROBORATED_COMPLETE
            else:
                verdict = REFUTED if closed else INCOMPLETE
                logger.warning(f"Aucun témoin pour un chemin de longueur {len(path) - 1} depuis {start}")
            report.records.append(
                {
                    "start": vertex_payload(start),
                    "start_in_PQ": bool(in_pq),
                    "path_length": len(path) - 1,
                    "variants_checked": variants_checked,
                    "witness_q": witness[0] if witness else None,
                    "witness_variant": witness[1] if witness else None,
                    "verdict": verdict,
                }
            )
    if not report.records:
        raise CatalogError("Aucun chemin échantillonné pour l'audit lipschitzien")
    logger.info(f"Audit lipschitzien: {report.summary()}")
    return report
