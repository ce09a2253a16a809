"""
Graphe de Farey exact: pentes, adjacence, distance et énumération des géodésiques.

Enveloppe de recherche: pour deux pentes a, b posons N = max(|a.p|, a.q, |b.p|, b.q, 1).
Toute géodésique de Farey de a à b ne visite que les sommets de l'échelle des triangles
traversés par la géodésique hyperbolique [a, b]. Ces sommets sont des ancêtres de Stern-Brocot
de a ou de b, ou des entiers situés entre a et b; ils sont donc tous dans slopes_up_to(N).
La BFS restreinte à slopes_up_to(N) donne ainsi la distance exacte. On arrondit N à la
puissance de deux supérieure (au moins 4) pour partager les caches entre requêtes.
"""

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Tuple

from dagster import get_dagster_logger

from pants_lab.topology.errors import EngineError, InvalidSlopeError

logger = get_dagster_logger()


@dataclass(frozen=True)
class Slope:
    """
    Pente réduite p/q, sommet du graphe de Farey. 1/0 représente l'infini.
    """
    p: int
    q: int

    def __post_init__(self):
        if self.q < 0 or (self.q == 0 and self.p != 1) or math.gcd(abs(self.p), self.q) != 1:
            raise InvalidSlopeError(f"Pente non normalisée: {self.p}/{self.q}")

    @property
    def sort_key(self) -> Tuple[int, int]:
        return (self.q, self.p)

    @property
    def height(self) -> int:
        return max(abs(self.p), self.q)

    def __lt__(self, other: "Slope") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


INFINITY = Slope(1, 0)


@dataclass(frozen=True)
class FareyPath:
    """
    Chemin d'arêtes dans le graphe de Farey.
    """
    vertices: Tuple[Slope, ...]

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("Un chemin de Farey contient au moins un sommet")
        for left, right in zip(self.vertices, self.vertices[1:]):
            if not is_adjacent(left, right):
                raise ValueError(f"Sommets non adjacents dans le chemin: {left} et {right}")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1


def reduce_slope(p: int, q: int) -> Slope:
    """
    Forme réduite de p/q avec dénominateur positif; tout (p, 0) devient 1/0.
    """
    if p == 0 and q == 0:
        raise InvalidSlopeError("La pente 0/0 n'existe pas")
    if q == 0:
        return INFINITY
    if q < 0:
        p, q = -p, -q
    g = math.gcd(abs(p), q)
    return Slope(p // g, q // g)


def parse_slope(text: str) -> Slope:
    """
    Lit une pente écrite "p/q" ou "p".
    """
    try:
        if "/" in text:
            numerator, denominator = text.split("/", 1)
            return reduce_slope(int(numerator), int(denominator))
        return reduce_slope(int(text), 1)
    except ValueError as e:
        if isinstance(e, InvalidSlopeError):
            raise
        raise InvalidSlopeError(f"Pente illisible: {text!r}") from e


def determinant(a: Slope, b: Slope) -> int:
    return a.p * b.q - a.q * b.p


def is_adjacent(a: Slope, b: Slope) -> bool:
    return abs(determinant(a, b)) == 1


def slopes_up_to(denominator_bound: int) -> FrozenSet[Slope]:
    """
    Toutes les pentes avec q <= borne et |p| <= borne, plus 1/0.
    """
    if denominator_bound < 1:
        raise ValueError(f"La borne doit être au moins 1 (reçu {denominator_bound})")
    return _slopes_up_to(denominator_bound)


@lru_cache(maxsize=None)
def _slopes_up_to(bound: int) -> FrozenSet[Slope]:
    slopes = {INFINITY}
    for q in range(1, bound + 1):
        for p in range(-bound, bound + 1):
            if math.gcd(abs(p), q) == 1:
                slopes.add(Slope(p, q))
    return frozenset(slopes)


def farey_neighbors(s: Slope, bound: int) -> List[Slope]:
    """
    Voisins de s dans le graphe de Farey tronqué à slopes_up_to(bound), triés par (q, p).
    """
    if s.q == 0:
        return sorted(Slope(r, 1) for r in range(-bound, bound + 1))
    neighbors = set()
    if s.q == 1:
        neighbors.add(INFINITY)
    for t in range(1, bound + 1):
        for eps in (1, -1):
            numerator = s.p * t - eps
            if numerator % s.q == 0:
                r = numerator // s.q
                if abs(r) <= bound:
                    neighbors.add(Slope(r, t))
    return sorted(neighbors)


def envelope(a: Slope, b: Slope) -> int:
    """
    Borne de dénominateur qui contient toutes les géodésiques de a à b.
    """
    height = max(a.height, b.height, 1)
    bound = 4
    while bound < height:
        bound *= 2
    return bound


@lru_cache(maxsize=8)
def _adjacency(bound: int) -> Dict[Slope, Tuple[Slope, ...]]:
    logger.debug(f"Construction de l'adjacence de Farey pour la borne {bound}")
    return {s: tuple(farey_neighbors(s, bound)) for s in _slopes_up_to(bound)}


@lru_cache(maxsize=512)
def _bfs_layers(source: Slope, bound: int) -> Dict[Slope, int]:
    adjacency = _adjacency(bound)
    if source not in adjacency:
        raise EngineError(f"La pente {source} sort de l'enveloppe {bound}")
    layers = {source: 0}
    queue = deque([source])
    while queue:
        current = queue.popleft()
        for neighbor in adjacency[current]:
            if neighbor not in layers:
                layers[neighbor] = layers[current] + 1
                queue.append(neighbor)
    return layers


def distance(a: Slope, b: Slope) -> int:
    """
    Distance de graphe entre deux pentes.
    """
    if a == b:
        return 0
    source, target = sorted((a, b))
    layers = _bfs_layers(source, envelope(a, b))
    if target not in layers:
        raise EngineError(f"{target} inaccessible depuis {source} dans l'enveloppe")
    return layers[target]


def all_geodesics(a: Slope, b: Slope, cap: int) -> Tuple[FrozenSet[FareyPath], bool]:
    """
    Géodésiques de a à b, au plus cap d'entre elles, avec un indicateur de complétude.
    """
    if cap <= 0:
        raise ValueError(f"cap doit être strictement positif (reçu {cap})")
    if a == b:
        return frozenset({FareyPath((a,))}), True

    bound = envelope(a, b)
    adjacency = _adjacency(bound)
    from_a = _bfs_layers(a, bound)
    from_b = _bfs_layers(b, bound)
    length = from_a[b]

    found: List[Tuple[Slope, ...]] = []
    stack: List[Tuple[Slope, ...]] = [(a,)]
    while stack and len(found) <= cap:
        partial = stack.pop()
        tail = partial[-1]
        if tail == b:
            found.append(partial)
            continue
        step = len(partial)
        # ordre inverse pour dépiler dans l'ordre (q, p)
        for neighbor in reversed(adjacency[tail]):
            if from_a.get(neighbor) == step and from_b.get(neighbor) == length - step:
                stack.append(partial + (neighbor,))

    complete = len(found) <= cap
    if not complete:
        logger.warning(f"Énumération des géodésiques de {a} à {b} tronquée à {cap}")
    return frozenset(FareyPath(vertices) for vertices in found[:cap]), complete


def bi_infinite_geodesic(index: int) -> Slope:
    """
    Sommet d'indice index de la géodésique fixée v_{k+1} = 2 v_k + v_{k-1}, v_0 = 0/1, v_1 = 1/0.
    """
    previous, current = (0, 1), (1, 0)
    if index == 0:
        return reduce_slope(*previous)
    if index > 0:
        for _ in range(index - 1):
            previous, current = current, (2 * current[0] + previous[0], 2 * current[1] + previous[1])
        return reduce_slope(*current)
    for _ in range(-index):
        previous, current = (current[0] - 2 * previous[0], current[1] - 2 * previous[1]), previous
    return reduce_slope(*previous)


def rank(genus: int, boundary: int) -> int:
    """
    Rang maximal d'un plat du graphe des pantalons: floor((3g + b - 2) / 2).
    """
    return (3 * genus + boundary - 2) // 2
