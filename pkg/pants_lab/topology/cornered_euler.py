"""
Comptabilité combinatoire des sous-surfaces cornues.

Une surface X est découpée par la frontière de Y en morceaux Z_i, chacun étiqueté "in" (dans Y)
ou "out". Chaque morceau est décrit par ses cycles de bord; un cycle est une suite de jetons:

    x:<composante>   segment de bord de X
    c:<composante>   courbe de bord de X entière (seule dans son cycle)
    +f / -f          arc de frontière f parcouru de son début à sa fin / en sens inverse
    f:<nom>          courbe de frontière fermée (seule dans son cycle)

Les cellules sont construites ainsi: chaque cycle donne un cycle d'arêtes, un morceau à b cycles
reçoit b - 1 arêtes ponts et 2g boucles, puis une face. Les arcs de frontière sont des arêtes
partagées entre les deux morceaux qui les bordent. Toute l'arithmétique est rationnelle.
"""

import os
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

from dagster import get_dagster_logger

from pants_lab.topology.errors import DecompositionError

logger = get_dagster_logger()

INSTANCE_LIBRARY_PATH = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "cornered_instances.txt")
LABELS = ("in", "out")


class PieceShape(Enum):
    RECTANGLE = "Rectangle"
    HEXAGON = "Hexagon"
    OCTAGON_2N_GON = "Octagon2nGon"
    RECTANGULAR_ANNULUS = "RectangularAnnulus"
    RECTANGULAR_PANTS_PAIR = "RectangularPantsPair"
    CURVE_BOUNDED_SURFACE = "CurveBoundedSurface"


@dataclass(frozen=True)
class PieceKind:
    """
    Type topologique d'un morceau cornu. polygon_arcs donne, pour chaque bord polygonal,
    son nombre d'arcs de frontière (n pour un 2n-gone).
    """
    shape: PieceShape
    genus: int = 0
    boundary_curves: int = 0
    polygon_arcs: Tuple[int, ...] = ()

    @property
    def n(self) -> Optional[int]:
        if self.shape in (PieceShape.RECTANGLE, PieceShape.HEXAGON, PieceShape.OCTAGON_2N_GON):
            return self.polygon_arcs[0]
        return None

    @property
    def frontier_arcs(self) -> int:
        return sum(self.polygon_arcs)

    @property
    def chi_bar(self) -> Fraction:
        boundary = self.boundary_curves + len(self.polygon_arcs)
        return Fraction(2 * self.genus - 2 + boundary)

    @property
    def chi_cornered(self) -> Fraction:
        return self.chi_bar + Fraction(self.frontier_arcs, 2)


def classify_piece(genus: int, boundary_curves: int, polygon_arcs: Sequence[int]) -> PieceKind:
    """
    Type d'un morceau d'après son genre, ses courbes de bord et ses bords polygonaux.
    """
    arcs = tuple(sorted(polygon_arcs))
    if genus == 0 and len(arcs) == 1:
        n = arcs[0]
        if boundary_curves == 0 and n >= 2:
            if n == 2:
                return PieceKind(PieceShape.RECTANGLE, 0, 0, arcs)
            if n == 3:
                return PieceKind(PieceShape.HEXAGON, 0, 0, arcs)
            return PieceKind(PieceShape.OCTAGON_2N_GON, 0, 0, arcs)
        if n == 2 and boundary_curves == 1:
            return PieceKind(PieceShape.RECTANGULAR_ANNULUS, 0, 1, arcs)
        if n == 2 and boundary_curves == 2:
            return PieceKind(PieceShape.RECTANGULAR_PANTS_PAIR, 0, 2, arcs)
    return PieceKind(PieceShape.CURVE_BOUNDED_SURFACE, genus, boundary_curves, arcs)


@dataclass(frozen=True)
class Piece:
    name: str
    label: str
    genus: int
    cycles: Tuple[Tuple[str, ...], ...]

    @property
    def kind(self) -> PieceKind:
        curves = sum(1 for cycle in self.cycles if _is_closed_cycle(cycle))
        polygons = [
            sum(1 for token in cycle if _is_frontier_token(token))
            for cycle in self.cycles
            if not _is_closed_cycle(cycle)
        ]
        return classify_piece(self.genus, curves, polygons)

    def boundary_components_met(self) -> Set[str]:
        """Composantes de bord de X touchées par les segments polygonaux du morceau."""
        return {
            token[2:]
            for cycle in self.cycles
            if not _is_closed_cycle(cycle)
            for token in cycle
            if token.startswith("x:")
        }


@dataclass
class CorneredComplex:
    """
    Complexe cellulaire de X avec ses arêtes de frontière et l'étiquetage des faces.
    """
    name: str
    vertices: Set[str]
    edges: Dict[str, Tuple[str, str]]
    faces: Dict[str, List[str]]
    frontier_edges: Set[str]
    piece_assignment: Dict[str, str]
    pieces: List[Piece]
    annotations: Dict[str, str] = field(default_factory=dict)

    def subcomplex_euler(self, faces: Sequence[str]) -> int:
        edges = {edge for face in faces for edge in self.faces[face]}
        vertices = {end for edge in edges for end in self.edges[edge]}
        return len(vertices) - len(edges) + len(faces)

    @property
    def euler(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def piece(self, name: str) -> Piece:
        for piece in self.pieces:
            if piece.name == name:
                return piece
        raise KeyError(name)


def _is_frontier_token(token: str) -> bool:
    return token[:1] in "+-"


def _is_closed_cycle(cycle: Sequence[str]) -> bool:
    return len(cycle) == 1 and (cycle[0].startswith("c:") or cycle[0].startswith("f:"))


# ---------------------------------------------------------------------------
# Construction et validation
# ---------------------------------------------------------------------------

def build_complex(name: str, pieces: Sequence[Piece], annotations: Optional[Dict[str, str]] = None) -> CorneredComplex:
    """
    Construit les cellules à partir des descriptions de recollement et les valide.
    """
    if not pieces:
        raise DecompositionError(f"{name}: aucun morceau")
    _validate_gluing(name, pieces)

    vertices: Set[str] = set()
    edges: Dict[str, Tuple[str, str]] = {}
    faces: Dict[str, List[str]] = {}
    frontier: Set[str] = set()

    for piece in pieces:
        face_edges: List[str] = []
        base_vertices: List[str] = []
        for index, cycle in enumerate(piece.cycles):
            if _is_closed_cycle(cycle):
                token = cycle[0]
                if token.startswith("f:"):
                    loop, vertex = token[2:], f"{token[2:]}.v"
                    frontier.add(loop)
                else:
                    loop, vertex = f"{piece.name}.c{index}", f"{piece.name}.c{index}.v"
                vertices.add(vertex)
                edges[loop] = (vertex, vertex)
                face_edges.append(loop)
                base_vertices.append(vertex)
                continue
            size = len(cycle)
            for position, token in enumerate(cycle):
                if not _is_frontier_token(token):
                    continue
                arc = token[1:]
                start, end = f"{arc}.s", f"{arc}.e"
                vertices.update((start, end))
                edges[arc] = (start, end)
                frontier.add(arc)
                face_edges.append(arc)
                # le segment qui précède l'arc finit au début de son parcours
                first = start if token[0] == "+" else end
                segment = f"{piece.name}.seg{index}.{(position - 1) % size}"
                edges[segment] = (_segment_tail(piece, index, (position - 1) % size), first)
                face_edges.append(segment)
            base_vertices.append(_first_vertex(cycle))
        for bridge, vertex in enumerate(base_vertices[1:], start=1):
            bridge_name = f"{piece.name}.bridge{bridge}"
            edges[bridge_name] = (base_vertices[0], vertex)
            face_edges.extend([bridge_name, bridge_name])
        for handle in range(2 * piece.genus):
            handle_name = f"{piece.name}.handle{handle}"
            edges[handle_name] = (base_vertices[0], base_vertices[0])
            face_edges.extend([handle_name, handle_name])
        faces[piece.name] = face_edges

    complex_ = CorneredComplex(
        name=name,
        vertices=vertices,
        edges=edges,
        faces=faces,
        frontier_edges=frontier,
        piece_assignment={piece.name: piece.label for piece in pieces},
        pieces=list(pieces),
        annotations=dict(annotations or {}),
    )
    _validate_cells(complex_)
    return complex_


def _segment_tail(piece: Piece, index: int, position: int) -> str:
    """Sommet de départ du segment de bord situé en position donnée dans un cycle alterné."""
    cycle = piece.cycles[index]
    previous = cycle[position - 1]
    arc = previous[1:]
    return f"{arc}.e" if previous[0] == "+" else f"{arc}.s"


def _first_vertex(cycle: Sequence[str]) -> str:
    for token in cycle:
        if _is_frontier_token(token):
            arc = token[1:]
            return f"{arc}.s" if token[0] == "+" else f"{arc}.e"
    raise DecompositionError(f"Cycle sans arc de frontière: {cycle}")


def _validate_gluing(name: str, pieces: Sequence[Piece]) -> None:
    occurrences: Dict[str, List[Tuple[str, str]]] = {}
    closed: Dict[str, List[str]] = {}
    endpoint_components: Dict[str, Set[str]] = {}
    names = Counter(piece.name for piece in pieces)
    duplicated = [piece for piece, count in names.items() if count > 1]
    if duplicated:
        raise DecompositionError(f"{name}: morceaux en double {duplicated}")

    for piece in pieces:
        if piece.label not in LABELS:
            raise DecompositionError(f"{name}/{piece.name}: étiquette inconnue {piece.label!r}")
        if piece.genus < 0 or not piece.cycles:
            raise DecompositionError(f"{name}/{piece.name}: genre ou cycles invalides")
        for cycle in piece.cycles:
            if not cycle:
                raise DecompositionError(f"{name}/{piece.name}: cycle vide")
            if _is_closed_cycle(cycle):
                if cycle[0].startswith("f:"):
                    closed.setdefault(cycle[0][2:], []).append(piece.label)
                continue
            size = len(cycle)
            if size % 2:
                raise DecompositionError(f"{name}/{piece.name}: cycle non alterné {cycle}")
            for position, token in enumerate(cycle):
                following = cycle[(position + 1) % size]
                if _is_frontier_token(token) == _is_frontier_token(following):
                    raise DecompositionError(
                        f"{name}/{piece.name}: jetons consécutifs de même nature {token} {following}"
                    )
                if not _is_frontier_token(token):
                    if not token.startswith("x:"):
                        raise DecompositionError(f"{name}/{piece.name}: jeton inconnu {token!r}")
                    continue
                arc, sign = token[1:], token[0]
                occurrences.setdefault(arc, []).append((sign, piece.label))
                before, after = cycle[position - 1][2:], following[2:]
                start_side, end_side = (before, after) if sign == "+" else (after, before)
                endpoint_components.setdefault(f"{arc}.s", set()).add(start_side)
                endpoint_components.setdefault(f"{arc}.e", set()).add(end_side)

    for arc, uses in occurrences.items():
        signs = sorted(sign for sign, _ in uses)
        labels = {label for _, label in uses}
        if signs != ["+", "-"] or labels != set(LABELS):
            raise DecompositionError(
                f"{name}: l'arc {arc} doit apparaître une fois dans chaque sens, entre un morceau in et un morceau out"
            )
    for curve, labels in closed.items():
        if sorted(labels) != sorted(LABELS):
            raise DecompositionError(f"{name}: la courbe de frontière {curve} doit séparer in et out")
    for vertex, components in endpoint_components.items():
        if len(components) != 1:
            raise DecompositionError(
                f"{name}: l'extrémité {vertex} touche plusieurs composantes {sorted(components)}"
            )


def _validate_cells(complex_: CorneredComplex) -> None:
    borders = Counter(edge for face in complex_.faces.values() for edge in set(face))
    for edge, count in borders.items():
        if count > 2:
            raise DecompositionError(f"{complex_.name}: l'arête {edge} borde {count} faces")
    for edge in complex_.frontier_edges:
        sides = {complex_.piece_assignment[face] for face, edges in complex_.faces.items() if edge in edges}
        if sides != set(LABELS):
            raise DecompositionError(f"{complex_.name}: l'arête de frontière {edge} ne sépare pas in et out")


# ---------------------------------------------------------------------------
# Caractéristiques d'Euler
# ---------------------------------------------------------------------------

def chi_bar(target: Union[CorneredComplex, PieceKind]) -> Fraction:
    """
    Opposé de la caractéristique d'Euler.
    """
    if isinstance(target, PieceKind):
        return target.chi_bar
    if not target.faces:
        raise DecompositionError(f"{target.name}: complexe vide")
    return Fraction(-target.euler)


def _frontier_chi_bar(complex_: CorneredComplex, faces: Sequence[str]) -> Fraction:
    edges = {edge for face in faces for edge in complex_.faces[face] if edge in complex_.frontier_edges}
    vertices = {end for edge in edges for end in complex_.edges[edge]}
    return Fraction(-(len(vertices) - len(edges)))


def chi_cornered(complex_: CorneredComplex, label: str = "in") -> Fraction:
    """
    chi_X(Y) = chi(X n Y) - 1/2 chi(Fr_X Y), calculé sur la partie étiquetée label.
    """
    faces = [face for face, assigned in complex_.piece_assignment.items() if assigned == label]
    if not faces:
        return Fraction(0)
    return Fraction(-complex_.subcomplex_euler(faces)) - _frontier_chi_bar(complex_, faces) / 2


def piece_chi_cornered(complex_: CorneredComplex, piece: Piece) -> Fraction:
    faces = [piece.name]
    return Fraction(-complex_.subcomplex_euler(faces)) - _frontier_chi_bar(complex_, faces) / 2


def split_and_verify(complex_: CorneredComplex) -> Tuple[List[Tuple[Piece, PieceKind, Fraction]], Fraction]:
    """
    Valeurs chi_X(Z_i) par morceau et vérification exacte de sum chi_X(Z_i) = chi(X).
    """
    pieces = []
    total = Fraction(0)
    for piece in complex_.pieces:
        kind = piece.kind
        value = piece_chi_cornered(complex_, piece)
        if value != kind.chi_cornered:
            raise DecompositionError(
                f"{complex_.name}/{piece.name}: {value} calculé sur les cellules, {kind.chi_cornered} attendu pour {kind.shape.value}"
            )
        pieces.append((piece, kind, value))
        total += value
    expected = chi_bar(complex_)
    if total != expected:
        logger.error(f"{complex_.name}: somme {total} différente de chi(X) = {expected}")
        raise DecompositionError(f"{complex_.name}: l'identité d'additivité échoue ({total} != {expected})")
    return pieces, total


def lemma_corner_holds(complex_: CorneredComplex) -> bool:
    """
    Si tous les morceaux ont chi_X >= 0 alors chi_X(Y) <= chi(X), avec égalité ssi les morceaux
    hors de Y totalisent zéro. Renvoie True si l'hypothèse n'est pas satisfaite.
    """
    pieces, total = split_and_verify(complex_)
    if any(value < 0 for _, _, value in pieces):
        return True
    inside = sum((value for piece, _, value in pieces if piece.label == "in"), Fraction(0))
    outside = sum((value for piece, _, value in pieces if piece.label == "out"), Fraction(0))
    if inside > total:
        return False
    return (inside == total) == (outside == 0)


def intersections_lemma_holds(complex_: CorneredComplex, components: Set[str]) -> bool:
    """
    Dans un pantalon: un octogone touche les trois composantes du bord, un anneau
    rectangulaire exactement deux.
    """
    for piece in complex_.pieces:
        kind = piece.kind
        met = piece.boundary_components_met() & components
        if kind.shape is PieceShape.OCTAGON_2N_GON and kind.n == 4 and met != components:
            return False
        if kind.shape is PieceShape.RECTANGULAR_ANNULUS and len(met) != 2:
            return False
    return True


# ---------------------------------------------------------------------------
# Bibliothèque d'instances
# ---------------------------------------------------------------------------

def parse_piece_line(line: str) -> Piece:
    """
    piece <nom> <in|out> [genus=<g>] : <cycle> | <cycle> ...
    """
    try:
        header, body = line.split(":", 1)
    except ValueError as e:
        raise DecompositionError(f"Ligne de morceau sans ':' : {line!r}") from e
    words = header.split()
    if len(words) < 3 or words[0] != "piece":
        raise DecompositionError(f"Ligne de morceau mal formée: {line!r}")
    genus = 0
    for option in words[3:]:
        key, _, value = option.partition("=")
        if key != "genus":
            raise DecompositionError(f"Option inconnue {option!r}")
        genus = int(value)
    cycles = tuple(tuple(part.split()) for part in body.split("|"))
    return Piece(name=words[1], label=words[2], genus=genus, cycles=cycles)


def load_instance_library(path: str = INSTANCE_LIBRARY_PATH) -> List[CorneredComplex]:
    """
    Charge et valide la bibliothèque d'instances décrites par recollement de morceaux.
    """
    instances: List[CorneredComplex] = []
    current: Optional[str] = None
    pieces: List[Piece] = []
    annotations: Dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            keyword = line.split()[0]
            try:
                if keyword == "instance":
                    current, pieces, annotations = line.split()[1], [], {}
                elif keyword == "annotate":
                    for pair in line.split()[1:]:
                        key, _, value = pair.partition("=")
                        annotations[key] = value
                elif keyword == "piece":
                    pieces.append(parse_piece_line(line))
                elif keyword == "end":
                    instances.append(build_complex(current, pieces, annotations))
                    current = None
                else:
                    raise DecompositionError(f"Mot-clé inconnu {keyword!r}")
            except DecompositionError as e:
                logger.error(f"{path}:{number}: {e}")
                raise
    if current is not None:
        raise DecompositionError(f"Instance {current} non terminée par 'end'")
    logger.info(f"{len(instances)} instances chargées depuis {path}")
    return instances


# ---------------------------------------------------------------------------
# Générateurs de décompositions
# ---------------------------------------------------------------------------

def _two_colour(cycles_by_piece: Dict[str, Tuple[Tuple[str, ...], ...]], first: str) -> Optional[Dict[str, str]]:
    """2-coloriage des morceaux à travers les arcs et courbes de frontière, ou None."""
    sides: Dict[str, List[str]] = {}
    for name, cycles in cycles_by_piece.items():
        for cycle in cycles:
            for token in cycle:
                if _is_frontier_token(token):
                    sides.setdefault(token[1:], []).append(name)
                elif token.startswith("f:"):
                    sides.setdefault(token, []).append(name)
    neighbours: Dict[str, List[str]] = {name: [] for name in cycles_by_piece}
    for owners in sides.values():
        if len(owners) == 2:
            a, b = owners
            neighbours[a].append(b)
            neighbours[b].append(a)
    colour = {first: "in"}
    queue = deque([first])
    while queue:
        current = queue.popleft()
        for other in neighbours[current]:
            wanted = "out" if colour[current] == "in" else "in"
            if other not in colour:
                colour[other] = wanted
                queue.append(other)
            elif colour[other] != wanted:
                return None
    if len(colour) != len(cycles_by_piece):
        return None
    return colour


def _assemble(name: str, cycles_by_piece: Dict[str, Tuple[Tuple[str, ...], ...]], swap: bool = False,
              annotations: Optional[Dict[str, str]] = None) -> Optional[CorneredComplex]:
    first = sorted(cycles_by_piece)[0]
    colour = _two_colour(cycles_by_piece, first)
    if colour is None:
        return None
    if swap:
        colour = {piece: ("out" if label == "in" else "in") for piece, label in colour.items()}
    pieces = [Piece(piece, colour[piece], 0, cycles) for piece, cycles in sorted(cycles_by_piece.items())]
    return build_complex(name, pieces, annotations)


def _random_noncrossing_matching(points: List[int], rng: random.Random) -> Dict[int, int]:
    matching: Dict[int, int] = {}
    stack = [points]
    while stack:
        block = stack.pop()
        if not block:
            continue
        partner_index = rng.randrange(1, len(block), 2)
        a, b = block[0], block[partner_index]
        matching[a], matching[b] = b, a
        stack.append(block[1:partner_index])
        stack.append(block[partner_index + 1:])
    return matching


def random_disk_decomposition(rng: random.Random, chords: int) -> CorneredComplex:
    """
    Disque découpé par des cordes disjointes aléatoires; les régions forment un arbre.
    """
    if chords < 1:
        raise ValueError("Il faut au moins une corde")
    size = 2 * chords
    matching = _random_noncrossing_matching(list(range(size)), rng)
    used: Set[int] = set()
    cycles_by_piece: Dict[str, Tuple[Tuple[str, ...], ...]] = {}
    for gap in range(size):
        if gap in used:
            continue
        tokens: List[str] = []
        current = gap
        while current not in used:
            used.add(current)
            tokens.append("x:0")
            point = (current + 1) % size
            partner = matching[point]
            low, high = sorted((point, partner))
            sign = "+" if point == low else "-"
            tokens.append(f"{sign}c{low}_{high}")
            current = partner
        cycles_by_piece[f"R{gap}"] = (tuple(tokens),)
    return _assemble(f"disk_{chords}", cycles_by_piece, swap=rng.random() < 0.5)


def annulus_spokes(spokes: int, swap: bool = False) -> CorneredComplex:
    """
    Anneau découpé en rectangles par un nombre pair de rayons joignant ses deux bords.
    """
    if spokes < 2 or spokes % 2:
        raise ValueError("Le nombre de rayons doit être pair et au moins 2")
    cycles_by_piece = {
        f"R{i:02d}": (("x:0", f"+s{(i + 1) % spokes}", "x:1", f"-s{i}"),)
        for i in range(spokes)
    }
    return _assemble(f"annulus_{spokes}", cycles_by_piece, swap=swap)


def _copies(arc: str, count: int) -> List[str]:
    return [f"{arc}_{k}" for k in range(1, count + 1)]


def _parallel_rectangles(arc: str, count: int, start: str, end: str, forward: bool = True) -> Dict[str, Tuple[Tuple[str, ...], ...]]:
    """Rectangles entre copies parallèles consécutives d'un arc allant de start à end."""
    copies = _copies(arc, count)
    rectangles = {}
    for k in range(count - 1):
        left, right = (copies[k], copies[k + 1]) if forward else (copies[k + 1], copies[k])
        rectangles[f"R_{arc}_{k + 1}"] = ((f"x:{start}", f"+{left}", f"x:{end}", f"-{right}"),)
    return rectangles


def pants_seam_system(m12: int, m23: int, m31: int) -> Dict[str, Tuple[Tuple[str, ...], ...]]:
    """
    Pantalon de bords 1, 2, 3 découpé par des copies parallèles des trois coutures.
    La couture sij va du bord i au bord j.
    """
    counts = {("1", "2"): m12, ("2", "3"): m23, ("3", "1"): m31}
    arcs = {pair: _copies(f"s{pair[0]}{pair[1]}", count) for pair, count in counts.items()}
    cycles: Dict[str, Tuple[Tuple[str, ...], ...]] = {}
    for (i, j), count in counts.items():
        cycles.update(_parallel_rectangles(f"s{i}{j}", count, i, j))
    present = [pair for pair, count in counts.items() if count]
    order = [("1", "2"), ("3", "1"), ("2", "3")]
    if len(present) == 3:
        cycles["H_front"] = (
            (f"-{arcs[('1', '2')][0]}", "x:1", f"-{arcs[('3', '1')][0]}", "x:3", f"-{arcs[('2', '3')][0]}", "x:2"),
        )
        cycles["H_back"] = (
            (f"+{arcs[('1', '2')][-1]}", "x:2", f"+{arcs[('2', '3')][-1]}", "x:3", f"+{arcs[('3', '1')][-1]}", "x:1"),
        )
    elif len(present) == 2:
        missing = next(pair for pair in order if not counts[pair])
        # rotation 1 -> 2 -> 3 -> 1 amenant la couture absente sur (2, 3)
        shift = {("2", "3"): 0, ("3", "1"): 1, ("1", "2"): 2}[missing]
        rotate = lambda label: str((int(label) - 1 + shift) % 3 + 1)  # noqa: E731
        a, b = (rotate("1"), rotate("2")), (rotate("3"), rotate("1"))
        cycles["O_main"] = ((
            f"-{arcs[a][0]}", f"x:{rotate('1')}", f"-{arcs[b][0]}", f"x:{rotate('3')}",
            f"+{arcs[b][-1]}", f"x:{rotate('1')}", f"+{arcs[a][-1]}", f"x:{rotate('2')}",
        ),)
    elif len(present) == 1:
        (i, j), = present
        k = ({"1", "2", "3"} - {i, j}).pop()
        cycles["A_main"] = ((f"-{arcs[(i, j)][0]}", f"x:{i}", f"+{arcs[(i, j)][-1]}", f"x:{j}"), (f"c:{k}",))
    return cycles


def pants_wave_system(base: str, waves: int, toward_j: int, toward_k: int) -> Dict[str, Tuple[Tuple[str, ...], ...]]:
    """
    Pantalon découpé par des copies d'une vague de base `base` et des coutures disjointes d'elle
    qui vont de `base` vers chacun des deux autres bords.
    """
    j, k = sorted({"1", "2", "3"} - {base})
    wave_copies = _copies(f"w{base}", waves)
    cycles: Dict[str, Tuple[Tuple[str, ...], ...]] = dict(_parallel_rectangles(f"w{base}", waves, base, base))
    for side, far, count, boundary in (("j", j, toward_j, f"-{wave_copies[0]}"), ("k", k, toward_k, f"+{wave_copies[-1]}")):
        seam = f"u{base}{far}"
        copies = _copies(seam, count)
        if not count:
            cycles[f"B_{side}"] = ((boundary, f"x:{base}"), (f"c:{far}",))
            continue
        cycles[f"H_{side}"] = ((boundary, f"x:{base}", f"+{copies[0]}", f"x:{far}", f"-{copies[-1]}", f"x:{base}"),)
        cycles.update(_parallel_rectangles(seam, count, base, far, forward=False))
    return cycles


def pants_arc_systems(max_multiplicity: int) -> Iterator[CorneredComplex]:
    """
    Toutes les décompositions 2-coloriables d'un pantalon par des systèmes d'arcs de frontière
    de multiplicité bornée, avec les deux étiquetages possibles.
    """
    for m12, m23, m31 in product(range(max_multiplicity + 1), repeat=3):
        if m12 + m23 + m31 == 0:
            continue
        cycles = pants_seam_system(m12, m23, m31)
        for swap in (False, True):
            built = _assemble(f"pants_seams_{m12}{m23}{m31}", cycles, swap=swap)
            if built is not None:
                yield built
    for base in ("1", "2", "3"):
        for waves in range(1, max_multiplicity + 1):
            for toward_j, toward_k in product(range(max_multiplicity + 1), repeat=2):
                cycles = pants_wave_system(base, waves, toward_j, toward_k)
                for swap in (False, True):
                    built = _assemble(f"pants_wave{base}_{waves}{toward_j}{toward_k}", cycles, swap=swap)
                    if built is not None:
                        yield built
