"""
Graphe des pantalons restreint à un catalogue de courbes: sommets, mouvements élémentaires,
distances, géodésiques, commutations, supports, d_Q et d_Y.

Toutes les distances sont calculées dans le sous-graphe induit par le catalogue; ce sont des
majorants de la vraie distance du graphe des pantalons.
"""

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

from dagster import get_dagster_logger

from pants_lab.topology.errors import CatalogError, EngineError, InvalidCoordinatesError, NotInWindowError
from pants_lab.topology.farey import bi_infinite_geodesic, distance as farey_distance
from pants_lab.topology.lamination_engine import (
    CurveCoords,
    MCGWord,
    SurfaceSpec,
    apply_word,
    enclosed_punctures,
    intersection_number,
    is_essential,
    is_single_curve,
    round_curve,
)
from pants_lab.topology.window_frames import (
    StandardWindow,
    complementary_regions,
    curve_with_window_slope,
    standard_windows,
    window_projection,
    window_slope,
)
from pants_lab.topology.window_models import WindowArc, project_arc

logger = get_dagster_logger()


class Unreachable:
    def __repr__(self) -> str:
        return "Unreachable"


class NotCommuting:
    def __repr__(self) -> str:
        return "NotCommuting"


UNREACHABLE = Unreachable()
NOT_COMMUTING = NotCommuting()


@dataclass(frozen=True)
class PantsVertex:
    """
    Décomposition en pantalons: xi courbes distinctes, deux à deux disjointes, triées.
    """
    surface: SurfaceSpec
    curves: Tuple[CurveCoords, ...]

    def __post_init__(self):
        ordered = tuple(sorted(set(self.curves)))
        if len(ordered) != len(self.curves):
            raise InvalidCoordinatesError("Courbes répétées dans la décomposition")
        if len(ordered) != self.surface.xi:
            raise InvalidCoordinatesError(
                f"Une décomposition de Sigma_0,{self.surface.punctures} a {self.surface.xi} courbes, {len(ordered)} reçues"
            )
        object.__setattr__(self, "curves", ordered)

    def contains(self, curves: Sequence[CurveCoords]) -> bool:
        return set(curves) <= set(self.curves)

    def __str__(self) -> str:
        return "{" + " ".join(str(c) for c in self.curves) + "}"


def make_vertex(surface: SurfaceSpec, curves: Sequence[CurveCoords]) -> PantsVertex:
    """
    Construit un sommet en vérifiant essentialité et disjonction deux à deux.
    """
    vertex = PantsVertex(surface, tuple(curves))
    for c in vertex.curves:
        if not is_essential(c, surface):
            raise InvalidCoordinatesError(f"{c} n'est pas essentielle")
    for a, b in combinations(vertex.curves, 2):
        if intersection_number(a, b):
            raise InvalidCoordinatesError(f"{a} et {b} se coupent")
    return vertex


@dataclass(frozen=True)
class ElementaryMoveEdge:
    source: PantsVertex
    target: PantsVertex
    removed: CurveCoords
    added: CurveCoords


@dataclass(frozen=True)
class MulticurveQ:
    """
    Multicourbe donnée par des courbes rondes (intervalles de piqûres), éventuellement déplacée
    par un mot de demi-twists.
    """
    surface: SurfaceSpec
    intervals: Tuple[Tuple[int, int], ...]
    word: Tuple[int, ...] = ()

    def __post_init__(self):
        regions = complementary_regions(self.surface, self.intervals)
        if any(len(items) > 3 for _, items in regions):
            raise InvalidCoordinatesError(
                f"Q = {self.intervals} laisse une région de complexité supérieure à un"
            )
        if not self.windows:
            raise InvalidCoordinatesError(f"Q = {self.intervals} n'a aucune fenêtre")

    @classmethod
    def standard(cls, surface: SurfaceSpec, puncture_sets: Sequence[Sequence[int]]) -> "MulticurveQ":
        intervals = []
        for punctures in puncture_sets:
            chosen = sorted(set(punctures))
            if not chosen or chosen[-1] - chosen[0] + 1 != len(chosen):
                raise InvalidCoordinatesError(f"{chosen} n'est pas un intervalle de piqûres")
            intervals.append((chosen[0], chosen[-1]))
        return cls(surface, tuple(sorted(set(intervals))))

    @property
    def is_standard(self) -> bool:
        return not self.word

    @property
    def windows(self) -> List[StandardWindow]:
        return standard_windows(self.surface, self.intervals)

    @property
    def curves(self) -> Tuple[CurveCoords, ...]:
        rounds = [round_curve(self.surface, s, t) for s, t in self.intervals]
        if self.word:
            rounds = [apply_word(c, MCGWord(self.surface, self.word)) for c in rounds]
        return tuple(sorted(rounds))

    def pull_back(self, c: CurveCoords) -> CurveCoords:
        """Transporte une courbe dans le repère où Q est standard."""
        if not self.word:
            return c
        return apply_word(c, MCGWord(self.surface, self.word).inverse())


# ---------------------------------------------------------------------------
# Catalogue
# ---------------------------------------------------------------------------

@dataclass
class CurveCatalog:
    """
    Courbes essentielles de norme bornée et leur matrice d'intersection (creuse, symétrique).
    """
    surface: SurfaceSpec
    norm_bound: int
    curves: Tuple[CurveCoords, ...]
    matrix: Dict[Tuple[int, int], int]
    index: Dict[CurveCoords, int] = field(default_factory=dict, repr=False)
    _disjoint: List[FrozenSet[int]] = field(default_factory=list, repr=False)
    _twice: List[FrozenSet[int]] = field(default_factory=list, repr=False)
    _neighbor_cache: Dict[Tuple[int, ...], Tuple[Tuple[int, ...], ...]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.index = {c: k for k, c in enumerate(self.curves)}
        disjoint: List[Set[int]] = [set(range(len(self.curves))) - {k} for k in range(len(self.curves))]
        twice: List[Set[int]] = [set() for _ in self.curves]
        for (i, j), value in self.matrix.items():
            if i == j or value < 0:
                raise CatalogError(f"Entrée invalide ({i}, {j}) = {value}")
            disjoint[i].discard(j)
            disjoint[j].discard(i)
            if value == 2:
                twice[i].add(j)
                twice[j].add(i)
        self._disjoint = [frozenset(entry) for entry in disjoint]
        self._twice = [frozenset(entry) for entry in twice]

    def __len__(self) -> int:
        return len(self.curves)

    def position(self, c: CurveCoords) -> int:
        try:
            return self.index[c]
        except KeyError:
            raise CatalogError(f"{c} n'est pas dans le catalogue (norme {self.norm_bound})") from None

    def intersection(self, a: CurveCoords, b: CurveCoords) -> int:
        i, j = sorted((self.position(a), self.position(b)))
        return self.matrix.get((i, j), 0)

    def key(self, u: PantsVertex) -> Tuple[int, ...]:
        return tuple(sorted(self.position(c) for c in u.curves))

    def vertex(self, key: Sequence[int]) -> PantsVertex:
        return PantsVertex(self.surface, tuple(self.curves[k] for k in key))

    def neighbor_keys(self, key: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
        cached = self._neighbor_cache.get(key)
        if cached is not None:
            return cached
        found: Set[Tuple[int, ...]] = set()
        members = set(key)
        for removed in key:
            others = [k for k in key if k != removed]
            candidates = set(self._twice[removed])
            for other in others:
                candidates &= self._disjoint[other]
            for added in candidates - members:
                found.add(tuple(sorted(others + [added])))
        result = tuple(sorted(found))
        self._neighbor_cache[key] = result
        return result


def enumerate_curves(surface: SurfaceSpec, norm_bound: int) -> List[CurveCoords]:
    """
    Courbes essentielles simples de norme au plus norm_bound, triées par (norme, vecteur).
    """
    curves = []
    for vector in product(range(-norm_bound, norm_bound + 1), repeat=surface.vector_length):
        if not any(vector):
            continue
        c = CurveCoords(surface, vector)
        if is_single_curve(c) and is_essential(c, surface):
            curves.append(c)
    curves.sort(key=lambda c: (c.norm, c.vector))
    return curves


def build_catalog(surface: SurfaceSpec, norm_bound: int, extra_curves: Sequence[CurveCoords] = ()) -> CurveCatalog:
    """
    Catalogue déterministe des courbes de norme bornée, complété par des courbes supplémentaires.
    """
    if norm_bound < 1:
        raise InvalidCoordinatesError(f"La borne de norme doit être au moins 1 (reçu {norm_bound})")
    curves = enumerate_curves(surface, norm_bound)
    known = set(curves)
    for c in extra_curves:
        if c not in known:
            curves.append(c)
            known.add(c)
    logger.info(f"Catalogue Sigma_0,{surface.punctures} norme {norm_bound}: {len(curves)} courbes")
    matrix: Dict[Tuple[int, int], int] = {}
    for i, j in combinations(range(len(curves)), 2):
        value = intersection_number(curves[i], curves[j])
        if value:
            matrix[(i, j)] = value
    logger.info(f"Matrice d'intersection: {len(matrix)} entrées non nulles")
    return CurveCatalog(surface, norm_bound, tuple(curves), matrix)


def pants_vertices(catalog: CurveCatalog, required: Sequence[CurveCoords] = ()) -> List[PantsVertex]:
    """
    Décompositions en pantalons formées de courbes du catalogue et contenant les courbes requises.
    """
    size = catalog.surface.xi
    base = sorted(catalog.position(c) for c in required)
    for a, b in combinations(base, 2):
        if b not in catalog._disjoint[a]:
            return []
    found: List[Tuple[int, ...]] = []

    def extend(chosen: List[int], allowed: Set[int], start: int) -> None:
        if len(chosen) == size:
            found.append(tuple(sorted(chosen)))
            return
        for k in sorted(allowed):
            if k < start:
                continue
            extend(chosen + [k], allowed & catalog._disjoint[k], k + 1)

    allowed = set(range(len(catalog)))
    for k in base:
        allowed &= catalog._disjoint[k]
    extend(list(base), allowed - set(base), 0)
    return [catalog.vertex(key) for key in sorted(set(found))]


# ---------------------------------------------------------------------------
# Arêtes et chemins
# ---------------------------------------------------------------------------

def _intersection(a: CurveCoords, b: CurveCoords, catalog: Optional[CurveCatalog]) -> int:
    if catalog is not None and a in catalog.index and b in catalog.index:
        return catalog.intersection(a, b)
    return intersection_number(a, b)


def is_elementary_edge(u: PantsVertex, v: PantsVertex, catalog: Optional[CurveCatalog] = None) -> bool:
    """
    Vrai si u et v partagent xi - 1 courbes et si les deux courbes restantes se coupent deux fois.
    """
    if u.surface != v.surface:
        return False
    removed = set(u.curves) - set(v.curves)
    added = set(v.curves) - set(u.curves)
    if len(removed) != 1 or len(added) != 1:
        return False
    return _intersection(removed.pop(), added.pop(), catalog) == 2


def edge_between(u: PantsVertex, v: PantsVertex) -> ElementaryMoveEdge:
    (removed,) = set(u.curves) - set(v.curves)
    (added,) = set(v.curves) - set(u.curves)
    return ElementaryMoveEdge(u, v, removed, added)


def neighbors_in_catalog(u: PantsVertex, catalog: CurveCatalog) -> Set[PantsVertex]:
    """
    Voisins de u dont toutes les courbes sont dans le catalogue.
    """
    key = catalog.key(u)
    result = {catalog.vertex(other) for other in catalog.neighbor_keys(key)}
    if not result:
        logger.warning(f"{u} n'a aucun voisin dans le catalogue (bord de troncature)")
    return result


def _bfs(catalog: CurveCatalog, source: Tuple[int, ...], depth: Optional[int] = None) -> Dict[Tuple[int, ...], int]:
    layers = {source: 0}
    queue = deque([source])
    while queue:
        current = queue.popleft()
        if depth is not None and layers[current] >= depth:
            continue
        for following in catalog.neighbor_keys(current):
            if following not in layers:
                layers[following] = layers[current] + 1
                queue.append(following)
    return layers


def catalog_distance(u: PantsVertex, v: PantsVertex, catalog: CurveCatalog) -> Union[int, Unreachable]:
    """
    Distance BFS bidirectionnelle dans le sous-graphe induit par le catalogue.
    """
    start, goal = catalog.key(u), catalog.key(v)
    if start == goal:
        return 0
    seen = [{start: 0}, {goal: 0}]
    frontiers = [[start], [goal]]
    while frontiers[0] and frontiers[1]:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        layer: List[Tuple[int, ...]] = []
        best: Optional[int] = None
        for current in frontiers[side]:
            for following in catalog.neighbor_keys(current):
                if following in seen[1 - side]:
                    total = seen[side][current] + 1 + seen[1 - side][following]
                    best = total if best is None else min(best, total)
                elif following not in seen[side]:
                    seen[side][following] = seen[side][current] + 1
                    layer.append(following)
        if best is not None:
            return best
        frontiers[side] = layer
    return UNREACHABLE


def all_min_paths(u: PantsVertex, v: PantsVertex, catalog: CurveCatalog, cap: int) -> Tuple[Set[Tuple[PantsVertex, ...]], bool]:
    """
    Chemins de longueur minimale dans le catalogue, au plus cap, avec indicateur de complétude.
    """
    if cap <= 0:
        raise ValueError(f"cap doit être strictement positif (reçu {cap})")
    length = catalog_distance(u, v, catalog)
    if length is UNREACHABLE:
        raise CatalogError(f"{v} inaccessible depuis {u} dans le catalogue")
    start, goal = catalog.key(u), catalog.key(v)
    if length == 0:
        return {(u,)}, True
    half = (length + 1) // 2
    from_start = _bfs(catalog, start, half)
    from_goal = _bfs(catalog, goal, length - half)

    found: List[Tuple[Tuple[int, ...], ...]] = []
    stack: List[Tuple[Tuple[int, ...], ...]] = [(start,)]
    while stack and len(found) <= cap:
        partial = stack.pop()
        tail = partial[-1]
        if tail == goal:
            found.append(partial)
            continue
        step = len(partial)
        for following in reversed(catalog.neighbor_keys(tail)):
            remaining = length - step
            if step <= half and from_start.get(following) != step:
                continue
            if remaining <= length - half and from_goal.get(following) != remaining:
                continue
            stack.append(partial + (following,))
    complete = len(found) <= cap
    if not complete:
        logger.warning(f"Énumération des géodésiques tronquée à {cap} chemins")
    paths = {tuple(catalog.vertex(key) for key in path) for path in found[:cap]}
    return paths, complete


def commute_adjacent_moves(path: Sequence[PantsVertex], i: int, catalog: Optional[CurveCatalog] = None) -> Union[Tuple[PantsVertex, ...], NotCommuting]:
    """
    Remplace nu_i par (nu_{i-1} n nu_{i+1}) u (nu_{i+1} \\ nu_i) u (nu_{i-1} \\ nu_i) quand les deux
    nouvelles arêtes sont des mouvements élémentaires.
    """
    if not 1 <= i <= len(path) - 2:
        raise IndexError(f"Position {i} hors de 1..{len(path) - 2}")
    before, middle, after = set(path[i - 1].curves), set(path[i].curves), set(path[i + 1].curves)
    swapped = (before & after) | (after - middle) | (before - middle)
    surface = path[i].surface
    if len(swapped) != surface.xi:
        return NOT_COMMUTING
    candidate = PantsVertex(surface, tuple(swapped))
    if candidate == path[i]:
        return NOT_COMMUTING
    if not is_elementary_edge(path[i - 1], candidate, catalog) or not is_elementary_edge(candidate, path[i + 1], catalog):
        return NOT_COMMUTING
    return tuple(path[:i]) + (candidate,) + tuple(path[i + 1:])


def commutation_closure(path: Sequence[PantsVertex], catalog: Optional[CurveCatalog] = None, limit: int = 512) -> Tuple[List[Tuple[PantsVertex, ...]], bool]:
    """
    Tous les chemins obtenus par commutations successives, avec indicateur de complétude.
    """
    origin = tuple(path)
    seen = {origin}
    order = [origin]
    queue = deque([origin])
    while queue:
        current = queue.popleft()
        for i in range(1, len(current) - 1):
            swapped = commute_adjacent_moves(current, i, catalog)
            if swapped is NOT_COMMUTING or swapped in seen:
                continue
            if len(seen) >= limit:
                return order, False
            seen.add(swapped)
            order.append(swapped)
            queue.append(swapped)
    return order, True


# ---------------------------------------------------------------------------
# Supports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathSupport:
    curves: FrozenSet[CurveCoords]
    regions: Tuple[Tuple[Optional[FrozenSet[int]], Tuple[FrozenSet[int], ...]], ...]

    @property
    def windows(self) -> Tuple[Tuple[Optional[FrozenSet[int]], Tuple[FrozenSet[int], ...]], ...]:
        """Régions complémentaires qui ne sont pas des pantalons."""
        return tuple(region for region in self.regions if len(region[1]) >= 3)

    @property
    def complexities(self) -> Tuple[int, ...]:
        return tuple(len(items) - 2 for _, items in self.windows)


def complementary_windows(surface: SurfaceSpec, curves: Sequence[CurveCoords]) -> Tuple[Tuple[Optional[FrozenSet[int]], Tuple[FrozenSet[int], ...]], ...]:
    """
    Régions complémentaires d'une multicourbe, lues sur la famille laminaire des ensembles de
    piqûres entourées. Chaque région est (ensemble extérieur ou None, items).
    """
    m = surface.disk_punctures
    family = sorted({frozenset(enclosed_punctures(c)) for c in curves}, key=lambda s: (-len(s), sorted(s)))
    regions = []
    for outer in [None] + family:
        domain = frozenset(range(1, m + 1)) if outer is None else outer
        inside = [s for s in family if s != outer and s <= domain]
        children = [s for s in inside if not any(s < other for other in inside)]
        covered = frozenset().union(*children) if children else frozenset()
        items = tuple(sorted(children + [frozenset({j}) for j in domain - covered], key=lambda s: min(s)))
        regions.append((outer, items))
    return tuple(regions)


def path_support(path: Sequence[PantsVertex]) -> PathSupport:
    """
    Multicourbe inchangée nu_0 n nu_p et décomposition de son complémentaire.
    """
    shared = frozenset(path[0].curves) & frozenset(path[-1].curves)
    return PathSupport(shared, complementary_windows(path[0].surface, sorted(shared)))


# ---------------------------------------------------------------------------
# Distances produit et projections
# ---------------------------------------------------------------------------

def window_curves(u: PantsVertex, Q: MulticurveQ) -> List[CurveCoords]:
    """
    Pour chaque fenêtre de Q, la courbe de u qui y est contenue (dans le repère standard).
    """
    q_curves = set(Q.curves)
    if not q_curves <= set(u.curves):
        raise InvalidCoordinatesError(f"{u} ne contient pas Q = {Q.intervals}")
    free = [Q.pull_back(c) for c in u.curves if c not in q_curves]
    chosen = []
    for window in Q.windows:
        inside = []
        for c in free:
            try:
                window_slope(c, window)
            except NotInWindowError:
                continue
            inside.append(c)
        if len(inside) != 1:
            raise EngineError(f"{len(inside)} courbes de {u} dans la fenêtre {window.items}")
        chosen.append(inside[0])
    return chosen


def window_coordinates(u: PantsVertex, Q: MulticurveQ) -> Tuple:
    return tuple(window_slope(c, window) for c, window in zip(window_curves(u, Q), Q.windows))


def dq_distance(u: PantsVertex, v: PantsVertex, Q: MulticurveQ) -> int:
    """
    Somme des distances de Farey des pentes de u et v dans les fenêtres de Q.
    """
    return sum(
        farey_distance(a, b) for a, b in zip(window_coordinates(u, Q), window_coordinates(v, Q))
    )


def projection_slopes(u: PantsVertex, window: StandardWindow) -> List:
    slopes = []
    for c in u.curves:
        for item in window_projection(c, window):
            slopes.append(project_arc(item).slope if isinstance(item, WindowArc) else item.slope)
    return slopes


def subsurface_distance(u: PantsVertex, v: PantsVertex, Q: MulticurveQ) -> int:
    """
    d_Y(u, v) = somme sur les fenêtres de max_{a in pi(u)} min_{b in pi(v)} d(a, b). Non symétrique.
    """
    if not Q.is_standard:
        raise InvalidCoordinatesError("d_Y demande une multicourbe Q standard")
    total = 0
    for window in Q.windows:
        source, target = projection_slopes(u, window), projection_slopes(v, window)
        if not source or not target:
            logger.error(f"Projection vide dans la fenêtre {window.items}")
            raise EngineError(f"Projection vide dans la fenêtre {window.items}")
        total += max(min(farey_distance(a, b) for b in target) for a in source)
    return total


def flat_embedding(Q: MulticurveQ, x: Sequence[int]) -> PantsVertex:
    """
    iota(x): Q complétée, dans chaque fenêtre, par le sommet x_i de la géodésique bi-infinie fixée.
    """
    windows = Q.windows
    if len(x) != len(windows):
        raise InvalidCoordinatesError(f"{len(x)} coordonnées pour {len(windows)} fenêtres")
    word = MCGWord(Q.surface, Q.word)
    curves = list(Q.curves)
    for coordinate, window in zip(x, windows):
        c = curve_with_window_slope(bi_infinite_geodesic(coordinate), window)
        curves.append(apply_word(c, word) if Q.word else c)
    return PantsVertex(Q.surface, tuple(curves))
