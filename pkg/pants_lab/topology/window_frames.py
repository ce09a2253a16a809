"""
Fenêtres standard de complexité un dans le disque piqué et dictionnaire des pentes.

Une fenêtre standard est la région comprise entre une courbe ronde extérieure (ou le bord du disque)
et trois items, chacun une piqûre ou une courbe ronde intérieure. En écrasant chaque item sur une
piqûre, une courbe de la fenêtre devient une courbe du modèle à trois piqûres (sphère à quatre
trous); sa pente s'y lit par les intersections avec les axes:

    |p| = i(c, R12) / 2     |q| = i(c, R23) / 2     signe de p/q = signe de a_2

ce qui place R12 en 0/1, R23 en 1/0 et l'arche autour de {1, 3} passant au-dessus de P2 en 1/1.
Coins de la taie d'oreiller: bord extérieur 0, item 1 -> 2, item 2 -> 3, item 3 -> 1.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from dagster import get_dagster_logger

from pants_lab.topology.errors import EngineError, InvalidCoordinatesError, NotInWindowError
from pants_lab.topology.farey import Slope, reduce_slope
from pants_lab.topology.lamination_engine import (
    CurveCoords,
    Letter,
    SurfaceSpec,
    Word,
    bigon_segments,
    component_words,
    enclosed_by_word,
    from_word,
    invert_word,
    is_simple_word,
    is_single_curve,
    reduce_word,
    round_intersection,
    word_vector,
)
from pants_lab.topology.window_models import Seam, Wave, WindowArc, WindowCurve, WindowKind, seam_pairs

logger = get_dagster_logger()

MODEL = SurfaceSpec(4)
CORNERS = {0: 0, 1: 2, 2: 3, 3: 1}
Interval = Tuple[int, int]


@dataclass(frozen=True)
class StandardWindow:
    """
    Fenêtre bordée par l'intervalle extérieur (None pour le bord du disque) et trois items.
    """
    surface: SurfaceSpec
    outer: Optional[Interval]
    items: Tuple[Interval, Interval, Interval]

    def __post_init__(self):
        m = self.surface.disk_punctures
        if len(self.items) != 3:
            raise InvalidCoordinatesError(f"Une fenêtre a trois items, {len(self.items)} reçus")
        low, high = self.span
        if not 1 <= low <= high <= m:
            raise InvalidCoordinatesError(f"Intervalle extérieur invalide {self.outer}")
        cursor = low
        for s, t in self.items:
            if s != cursor or t < s:
                raise InvalidCoordinatesError(f"Les items {self.items} ne pavent pas {low}..{high}")
            cursor = t + 1
        if cursor != high + 1:
            raise InvalidCoordinatesError(f"Les items {self.items} ne pavent pas {low}..{high}")

    @property
    def span(self) -> Interval:
        if self.outer is None:
            return 1, self.surface.disk_punctures
        return self.outer

    def item_of(self, j: int) -> int:
        for index, (s, t) in enumerate(self.items, start=1):
            if s <= j <= t:
                return index
        raise NotInWindowError(f"La piqûre {j} n'appartient à aucun item")

    def boundary_curves(self) -> Dict[Union[str, int], Interval]:
        """Courbes rondes qui bordent la fenêtre, indexées par 'outer' ou par numéro d'item."""
        curves: Dict[Union[str, int], Interval] = {}
        if self.outer is not None:
            curves["outer"] = self.outer
        for index, (s, t) in enumerate(self.items, start=1):
            if t > s:
                curves[index] = (s, t)
        return curves


def complementary_regions(surface: SurfaceSpec, intervals: Sequence[Interval]) -> List[Tuple[Optional[Interval], Tuple[Interval, ...]]]:
    """
    Régions complémentaires d'une famille laminaire de courbes rondes: (extérieur, items).
    Une région à k items est une sphère à k + 1 trous, de complexité k - 2.
    """
    m = surface.disk_punctures
    family = sorted(set(intervals), key=lambda interval: (interval[0], -interval[1]))
    for s, t in family:
        if not 1 <= s < t <= m or t - s + 1 > m - 1:
            raise InvalidCoordinatesError(f"Intervalle {s}..{t} sans courbe ronde essentielle")
    for first in family:
        for second in family:
            disjoint = first[1] < second[0] or second[1] < first[0]
            nested = (first[0] <= second[0] and second[1] <= first[1]) or (second[0] <= first[0] and first[1] <= second[1])
            if not (disjoint or nested):
                raise InvalidCoordinatesError(f"Courbes rondes {first} et {second} sécantes")

    regions = []
    for outer in [None] + family:
        low, high = (1, m) if outer is None else outer
        inside = [interval for interval in family if interval != outer and low <= interval[0] and interval[1] <= high]
        children = [
            interval for interval in inside
            if not any(other != interval and other[0] <= interval[0] and interval[1] <= other[1] for other in inside)
        ]
        items: List[Interval] = []
        j = low
        while j <= high:
            child = next((interval for interval in children if interval[0] == j), None)
            if child is None:
                items.append((j, j))
                j += 1
            else:
                items.append(child)
                j = child[1] + 1
        regions.append((outer, tuple(items)))
    return regions


def standard_windows(surface: SurfaceSpec, intervals: Sequence[Interval]) -> List[StandardWindow]:
    return [
        StandardWindow(surface, outer, items)
        for outer, items in complementary_regions(surface, intervals)
        if len(items) == 3
    ]


# ---------------------------------------------------------------------------
# Écrasement et dépliage
# ---------------------------------------------------------------------------

def _collapse_letters(letters: Sequence[Letter], window: StandardWindow) -> Optional[List[Letter]]:
    low, high = window.span
    collapsed: List[Letter] = []
    index = 0
    while index < len(letters):
        ray, j, sign = letters[index]
        if not low <= j <= high:
            return None
        item = window.item_of(j)
        s, t = window.items[item - 1]
        run = range(s, t + 1) if sign > 0 else range(t, s - 1, -1)
        expected = [(ray, k, sign) for k in run]
        if list(letters[index:index + len(expected)]) != expected:
            return None
        collapsed.append((ray, item, sign))
        index += len(expected)
    return collapsed


def collapse_word(word: Sequence[Letter], window: StandardWindow) -> Optional[Word]:
    """
    Mot du modèle à trois piqûres d'une courbe contenue dans la fenêtre, ou None.
    """
    for start, (ray, j, sign) in enumerate(word):
        low, high = window.span
        if not low <= j <= high:
            return None
        s, t = window.items[window.item_of(j) - 1]
        if j == (s if sign > 0 else t):
            rotated = tuple(word[start:]) + tuple(word[:start])
            collapsed = _collapse_letters(rotated, window)
            return None if collapsed is None else tuple(collapsed)
    return None


def expand_word(word: Sequence[Letter], window: StandardWindow) -> Word:
    expanded: List[Letter] = []
    for ray, item, sign in word:
        s, t = window.items[item - 1]
        run = range(s, t + 1) if sign > 0 else range(t, s - 1, -1)
        expanded.extend((ray, k, sign) for k in run)
    return tuple(expanded)


# ---------------------------------------------------------------------------
# Pentes
# ---------------------------------------------------------------------------

def model_slope(word: Sequence[Letter]) -> Slope:
    """
    Pente d'une courbe essentielle du modèle à trois piqûres.
    """
    p = round_intersection(1, 2, word) // 2
    q = round_intersection(2, 3, word) // 2
    if math.gcd(p, q) != 1:
        raise EngineError(f"Intersections {2 * p}, {2 * q} incompatibles avec une courbe simple")
    if p == 0 or q == 0:
        return reduce_slope(p, q)
    a_2 = word_vector(word, 3)[0]
    if a_2 == 0:
        raise EngineError(f"Signe indéterminé pour la pente ±{p}/{q}")
    return reduce_slope(p if a_2 > 0 else -p, q)


def window_slope(c: CurveCoords, window: StandardWindow) -> Slope:
    """
    Pente de la courbe dans le repère fixe de la fenêtre.
    """
    if c.surface != window.surface:
        raise NotInWindowError("La courbe et la fenêtre vivent sur des surfaces différentes")
    words = component_words(c)
    if len(words) != 1:
        raise NotInWindowError(f"{c} n'est pas une courbe unique")
    collapsed = collapse_word(words[0], window)
    if collapsed is None or not any(word_vector(collapsed, 3)):
        raise NotInWindowError(f"{c} n'est pas contenue dans la fenêtre {window.items}")
    return model_slope(collapsed)


@lru_cache(maxsize=4096)
def _model_word(slope: Slope) -> Word:
    p, q = abs(slope.p), slope.q
    b = q - p
    sign = 1 if slope.p * slope.q >= 0 else -1
    for magnitude in range(0, p + q + 1):
        candidate = CurveCoords(MODEL, (sign * magnitude, b)) if (magnitude or b) else None
        if candidate is None or not is_single_curve(candidate):
            continue
        word = component_words(candidate)[0]
        if len(enclosed_by_word(word, 3)) == 2 and model_slope(word) == slope:
            return word
    raise EngineError(f"Aucune courbe du modèle de pente {slope}")


def curve_with_window_slope(slope: Slope, window: StandardWindow) -> CurveCoords:
    """
    Courbe de la fenêtre de pente donnée (inverse de window_slope).
    """
    return from_word(window.surface, expand_word(_model_word(slope), window))


def window_axes(window: StandardWindow) -> Tuple[CurveCoords, CurveCoords, CurveCoords]:
    return tuple(curve_with_window_slope(Slope(p, q), window) for p, q in ((0, 1), (1, 0), (1, 1)))


# ---------------------------------------------------------------------------
# Projection dans une fenêtre
# ---------------------------------------------------------------------------

def _lines_in_strip(window: StandardWindow, strip: int) -> List[Tuple[Union[str, int], str]]:
    """Verticales de la bande de gauche à droite: droites des intervalles qui finissent (du plus
    profond au moins profond) puis gauches de ceux qui commencent (du moins profond au plus profond)."""
    curves = window.boundary_curves()
    ending = [(key, "R") for key, (s, t) in curves.items() if t == strip]
    starting = [(key, "L") for key, (s, t) in curves.items() if s == strip + 1]
    ending.sort(key=lambda entry: 0 if entry[0] != "outer" else 1)
    starting.sort(key=lambda entry: 0 if entry[0] == "outer" else 1)
    return ending + starting


def _events(word: Word, window: StandardWindow) -> List[Tuple[int, int, Union[str, int], str, int]]:
    """
    Traversées essentielles du bord de la fenêtre: (position, rang dans le passage, courbe, côté, sens).
    """
    removed: Set[Tuple[int, Union[str, int]]] = set()
    for key, (s, t) in window.boundary_curves().items():
        crossings, dropped = bigon_segments(word, s, t)
        removed.update((crossings[index][0], key) for index in dropped)

    size = len(word)
    events = []
    for position, (_, j, sign) in enumerate(word):
        _, next_j, next_sign = word[(position + 1) % size]
        if sign == next_sign == 1 and next_j == j + 1:
            strip, direction = j, 1
        elif sign == next_sign == -1 and next_j == j - 1:
            strip, direction = next_j, -1
        else:
            continue
        lines = _lines_in_strip(window, strip)
        if direction == -1:
            lines = lines[::-1]
        for rank, (key, side) in enumerate(lines):
            if (position, key) not in removed:
                events.append((position, rank, key, side, direction))
    return events


def _enters_window(key: Union[str, int], side: str, direction: int) -> bool:
    outward = (side == "R" and direction == 1) or (side == "L" and direction == -1)
    return outward if key != "outer" else not outward


def _model_strip(key: Union[str, int], side: str) -> int:
    """Bande du modèle où se trouve la courbe juste après la traversée."""
    if key == "outer":
        return 0 if side == "L" else 3
    return key if side == "R" else key - 1


def _boundary_loops(label: Union[str, int], strip: int) -> List[List[Letter]]:
    if label == "outer":
        if strip == 0:
            loop = [("U", 1, 1), ("U", 2, 1), ("U", 3, 1), ("D", 3, -1), ("D", 2, -1), ("D", 1, -1)]
        else:
            loop = [("U", 3, -1), ("U", 2, -1), ("U", 1, -1), ("D", 1, 1), ("D", 2, 1), ("D", 3, 1)]
    elif strip == label:
        loop = [("U", label, -1), ("D", label, 1)]
    else:
        loop = [("U", label, 1), ("D", label, -1)]
    return [loop, list(invert_word(loop))]


def _closing_paths(label: Union[str, int], end_strip: int, start_strip: int) -> List[List[Letter]]:
    if end_strip == start_strip:
        return [[]] + _boundary_loops(label, end_strip)
    sign = 1 if start_strip > end_strip else -1
    if label == "outer":
        order = [1, 2, 3] if sign == 1 else [3, 2, 1]
        return [[(ray, k, sign) for k in order] for ray in ("U", "D")]
    return [[("U", label, sign)], [("D", label, sign)]]


def _classify_arc(alpha: List[Letter], start: Tuple[Union[str, int], int], end: Tuple[Union[str, int], int]) -> WindowArc:
    (label_a, strip_a), (label_b, strip_b) = start, end
    if label_a == label_b:
        candidates = [alpha + closing for closing in _closing_paths(label_a, strip_b, strip_a)]
    else:
        candidates = [
            alpha + loop_b + list(invert_word(alpha)) + loop_a
            for loop_b in _boundary_loops(label_b, strip_b)
            for loop_a in _boundary_loops(label_a, strip_a)
        ]
    found: Dict[Tuple[int, ...], Word] = {}
    for candidate in candidates:
        reduced = reduce_word(candidate)
        if not reduced or not is_simple_word(MODEL, reduced):
            continue
        if len(enclosed_by_word(reduced, 3)) != 2:
            continue
        found.setdefault(word_vector(reduced, 3), reduced)
    if len(found) != 1:
        raise EngineError(f"Projection d'arc indéterminée ({len(found)} candidates) pour {alpha}")
    slope = model_slope(next(iter(found.values())))
    corner_a = CORNERS[0 if label_a == "outer" else label_a]
    corner_b = CORNERS[0 if label_b == "outer" else label_b]
    if label_a == label_b:
        return WindowArc(WindowKind.FOUR_PUNCTURED_SPHERE, Wave(corner_a, slope))
    endpoints = frozenset({corner_a, corner_b})
    if endpoints not in seam_pairs(slope):
        raise EngineError(f"Couture {sorted(endpoints)} incompatible avec la pente {slope}")
    return WindowArc(WindowKind.FOUR_PUNCTURED_SPHERE, Seam(slope, endpoints))


def window_projection(c: CurveCoords, window: StandardWindow) -> List[Union[WindowCurve, WindowArc]]:
    """
    Courbes et arcs de c à l'intérieur de la fenêtre. Liste vide si c évite la fenêtre.
    """
    result: List[Union[WindowCurve, WindowArc]] = []
    for word in component_words(c):
        events = _events(word, window)
        if not events:
            collapsed = collapse_word(word, window)
            if collapsed is not None and any(word_vector(collapsed, 3)):
                result.append(WindowCurve(WindowKind.FOUR_PUNCTURED_SPHERE, model_slope(collapsed)))
            continue
        size = len(word)
        for index, (position, rank, key, side, direction) in enumerate(events):
            if not _enters_window(key, side, direction):
                continue
            next_position, next_rank, next_key, next_side, next_direction = events[(index + 1) % len(events)]
            count = (next_position - position) % size
            if count == 0 and (next_position, next_rank) <= (position, rank):
                count = size
            letters = [word[(position + offset) % size] for offset in range(1, count + 1)]
            alpha = _collapse_letters(letters, window)
            if alpha is None:
                raise EngineError(f"Arc non écrasable dans la fenêtre {window.items}: {letters}")
            if _enters_window(next_key, next_side, next_direction):
                raise EngineError(f"Deux entrées consécutives dans la fenêtre {window.items}")
            start = (key, _model_strip(key, side))
            end = (next_key, _model_strip(next_key, next_side))
            result.append(_classify_arc(alpha, start, end))
    return result
