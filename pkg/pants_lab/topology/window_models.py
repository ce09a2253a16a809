"""
Modèles exacts des deux fenêtres de complexité un: le tore épointé et la sphère à quatre trous.

Sphère à quatre trous: modèle de la taie d'oreiller, quotient du tore R^2 / 2Z^2 par -id.
Les coins sont les classes de parité des points entiers, numérotées (x mod 2) + 2 (y mod 2).
Une couture de pente p/q relie v à v + (q, p); ses extrémités forment la paire {c, c XOR delta}
avec delta = (q mod 2) + 2 (p mod 2):

    (p pair, q impair)   -> {0,1} | {2,3}
    (p impair, q pair)   -> {0,2} | {1,3}
    (p impair, q impair) -> {0,3} | {1,2}

Une vague (base b, pente compagne t) est le bord d'un voisinage de la couture de pente t qui relie
b au coin x = b XOR delta(t), ouvert en b; elle se projette sur la courbe de pente t.
"""

import os
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, List, Tuple, Union

import pandas as pd
from dagster import get_dagster_logger

from pants_lab.topology.errors import EngineError, WindowMismatchError
from pants_lab.topology.farey import Slope, determinant, slopes_up_to

logger = get_dagster_logger()

RULE_TABLE_PATH = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "disjointness_rules.tsv")
RULE_TABLE_VERSION = 1
RULE_TABLE_COLUMNS = ["window", "classes", "det", "signature", "disjoint"]


class WindowKind(Enum):
    ONCE_PUNCTURED_TORUS = "OncePuncturedTorus"
    FOUR_PUNCTURED_SPHERE = "FourPuncturedSphere"


@dataclass(frozen=True)
class WindowCurve:
    window: WindowKind
    slope: Slope


@dataclass(frozen=True)
class Seam:
    slope: Slope
    endpoints: FrozenSet[int]


@dataclass(frozen=True)
class Wave:
    base: int
    companion_slope: Slope


ArcClass = Union[Seam, Wave]


@dataclass(frozen=True)
class WindowArc:
    """
    Classe d'isotopie d'un arc essentiel dans une fenêtre.
    """
    window: WindowKind
    arc_class: ArcClass

    def __post_init__(self):
        arc = self.arc_class
        if self.window is WindowKind.ONCE_PUNCTURED_TORUS:
            if not isinstance(arc, Wave) or arc.base != 0:
                raise ValueError("Dans le tore épointé tout arc est une vague de base 0")
            return
        if isinstance(arc, Seam):
            if arc.endpoints not in seam_pairs(arc.slope):
                raise ValueError(
                    f"Extrémités {sorted(arc.endpoints)} incompatibles avec la pente {arc.slope}"
                )
        elif arc.base not in range(4):
            raise ValueError(f"Coin de base invalide: {arc.base}")

    @property
    def is_seam(self) -> bool:
        return isinstance(self.arc_class, Seam)

    @property
    def slope(self) -> Slope:
        if isinstance(self.arc_class, Seam):
            return self.arc_class.slope
        return self.arc_class.companion_slope


def parity_shift(slope: Slope) -> int:
    return (slope.q % 2) + 2 * (slope.p % 2)


def seam_pairs(slope: Slope) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """
    Les deux paires de coins reliées par les coutures de cette pente.
    """
    delta = parity_shift(slope)
    first = frozenset({0, delta})
    second = frozenset(set(range(4)) - first)
    return first, second


def far_corner(wave: Wave) -> int:
    """Coin entouré par la vague."""
    return wave.base ^ parity_shift(wave.companion_slope)


def hugged_seam(wave: Wave) -> Seam:
    return Seam(wave.companion_slope, frozenset({wave.base, far_corner(wave)}))


def window_chi_bar(window: WindowKind) -> int:
    return 1 if window is WindowKind.ONCE_PUNCTURED_TORUS else 2


def _check_same_window(a, b) -> None:
    if a.window is not b.window:
        raise WindowMismatchError(f"Fenêtres différentes: {a.window.value} et {b.window.value}")


def window_intersection(a: WindowCurve, b: WindowCurve) -> int:
    """
    Nombre d'intersection géométrique de deux courbes d'une même fenêtre.
    """
    _check_same_window(a, b)
    factor = 1 if a.window is WindowKind.ONCE_PUNCTURED_TORUS else 2
    return factor * abs(determinant(a.slope, b.slope))


def project_arc(a: WindowArc) -> WindowCurve:
    """
    Projection d'un arc: l'unique courbe de la fenêtre disjointe de l'arc.
    """
    return WindowCurve(a.window, a.slope)


# ---------------------------------------------------------------------------
# Oracle: comptage des croisements des relevés dans le plan
# ---------------------------------------------------------------------------

def _corner_point(corner: int) -> Tuple[int, int]:
    return corner & 1, corner >> 1


def _lifted_seam_crossings(first: Seam, second: Seam) -> int:
    """
    Croisements intérieurs de deux coutures, comptés sur un relevé de la première.

    Les relevés de la seconde sont les droites p2 x - q2 y = c avec c de la parité du coin.
    """
    if first == second:
        return 0
    start = _corner_point(min(first.endpoints))
    p2, q2 = second.slope.p, second.slope.q
    level = lambda x, y: p2 * x - q2 * y  # noqa: E731
    low = level(*start)
    high = low + level(first.slope.q, first.slope.p)
    if low > high:
        low, high = high, low
    parity = level(*_corner_point(min(second.endpoints))) % 2
    return sum(1 for c in range(low + 1, high) if c % 2 == parity)


def arc_crossings(a: WindowArc, b: WindowArc) -> int:
    """
    Nombre minimal de croisements intérieurs de deux classes d'arcs (oracle géométrique).
    """
    _check_same_window(a, b)
    if a == b:
        return 0
    if a.window is WindowKind.ONCE_PUNCTURED_TORUS:
        return max(abs(determinant(a.slope, b.slope)) - 1, 0)

    first, second = a.arc_class, b.arc_class
    if isinstance(first, Wave) and isinstance(second, Seam):
        first, second = second, first
    if isinstance(first, Seam) and isinstance(second, Seam):
        return _lifted_seam_crossings(first, second)
    if isinstance(first, Seam):
        tau = hugged_seam(second)
        if first == tau:
            return 0
        touches_far = 1 if far_corner(second) in first.endpoints else 0
        return 2 * _lifted_seam_crossings(first, tau) + touches_far

    tau_first, tau_second = hugged_seam(first), hugged_seam(second)
    x_first, x_second = far_corner(first), far_corner(second)
    core = 0 if tau_first == tau_second else _lifted_seam_crossings(tau_first, tau_second)
    return (
        4 * core
        + 2 * (x_first == x_second)
        + 2 * (x_first == second.base)
        + 2 * (x_second == first.base)
    )


# ---------------------------------------------------------------------------
# Table de règles figée
# ---------------------------------------------------------------------------

def _pattern(a: WindowArc, b: WindowArc) -> Tuple[str, str, int, str]:
    """
    Motif combinatoire (fenêtre, classes, |det| plafonné à 3, signature) d'une paire d'arcs.
    """
    det = min(abs(determinant(a.slope, b.slope)), 3)
    if a.window is WindowKind.ONCE_PUNCTURED_TORUS:
        return ("torus", "wave/wave", det, "-")

    first, second = a.arc_class, b.arc_class
    if isinstance(first, Wave) and isinstance(second, Seam):
        first, second = second, first
    if isinstance(first, Seam) and isinstance(second, Seam):
        shared = len(first.endpoints & second.endpoints)
        return ("sphere", "seam/seam", det, f"E{shared}")
    if isinstance(first, Seam):
        x = far_corner(second)
        shared = len(first.endpoints & {second.base, x})
        hit = int(x in first.endpoints)
        hug = int(first == hugged_seam(second))
        return ("sphere", "seam/wave", det, f"E{shared}x{hit}h{hug}")
    x_first, x_second = far_corner(first), far_corner(second)
    same_base = int(first.base == second.base)
    same_far = int(x_first == x_second)
    cross_hits = int(x_first == second.base) + int(x_second == first.base)
    return ("sphere", "wave/wave", det, f"b{same_base}x{same_far}c{cross_hits}")


def regenerate_rule_table(slope_bound: int = 6) -> pd.DataFrame:
    """
    Recalcule la table de disjonction à partir de l'oracle sur toutes les paires d'arcs bornées.
    """
    verdicts: Dict[Tuple[str, str, int, str], int] = {}
    for window in WindowKind:
        for a, b in combinations(enumerate_arcs(window, slope_bound), 2):
            key = _pattern(a, b)
            verdict = int(arc_crossings(a, b) == 0)
            previous = verdicts.setdefault(key, verdict)
            if previous != verdict:
                logger.error(f"Motif ambigu {key}: {a} et {b}")
                raise EngineError(f"Le motif {key} ne détermine pas la disjonction")
    rows = [list(key) + [value] for key, value in sorted(verdicts.items())]
    logger.info(f"Table de disjonction régénérée: {len(rows)} motifs")
    return pd.DataFrame(rows, columns=RULE_TABLE_COLUMNS)


def write_rule_table(table: pd.DataFrame, path: str = RULE_TABLE_PATH) -> str:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"# table de disjonction des classes d'arcs, version {RULE_TABLE_VERSION}\n")
        handle.write("# det vaut 3 pour tout déterminant au moins égal à 3\n")
        table.to_csv(handle, sep="\t", index=False)
    return path


@lru_cache(maxsize=None)
def load_rule_table(path: str = RULE_TABLE_PATH) -> Dict[Tuple[str, str, int, str], bool]:
    """
    Charge la table figée livrée avec le paquet.
    """
    table = pd.read_csv(path, sep="\t", comment="#", dtype={"det": int, "disjoint": int})
    if list(table.columns) != RULE_TABLE_COLUMNS:
        raise EngineError(f"Colonnes inattendues dans {path}: {list(table.columns)}")
    return {
        (row.window, row.classes, int(row.det), row.signature): bool(row.disjoint)
        for row in table.itertuples(index=False)
    }


def arcs_disjoint(a: WindowArc, b: WindowArc) -> bool:
    """
    Vrai si les deux classes d'arcs admettent des représentants disjoints.
    """
    _check_same_window(a, b)
    if a == b:
        return True
    key = _pattern(a, b)
    table = load_rule_table()
    if key not in table:
        raise EngineError(f"Motif absent de la table de disjonction: {key}")
    return table[key]


def enumerate_arcs(window: WindowKind, slope_bound: int) -> List[WindowArc]:
    """
    Toutes les classes d'arcs dont la pente est dans slopes_up_to(borne), en ordre déterministe.
    """
    if slope_bound < 1:
        raise ValueError(f"La borne de pente doit être au moins 1 (reçu {slope_bound})")
    arcs: List[WindowArc] = []
    for slope in sorted(slopes_up_to(slope_bound)):
        if window is WindowKind.ONCE_PUNCTURED_TORUS:
            arcs.append(WindowArc(window, Wave(0, slope)))
            continue
        for pair in seam_pairs(slope):
            arcs.append(WindowArc(window, Seam(slope, pair)))
        for base in range(4):
            arcs.append(WindowArc(window, Wave(base, slope)))
    return arcs
