"""
Coordonnées entières des multicourbes simples de la sphère à n trous.

La sphère Sigma_{0,n} est vue comme un disque à m = n - 1 piqûres P_1..P_m posées sur l'axe
horizontal; le bord du disque joue le rôle de la n-ième piqûre. Chaque piqûre P_j porte un rayon
montant U_j et un rayon descendant D_j qui découpent le disque en bandes S_0..S_m.

Une courbe en position minimale est décrite par le mot cyclique de ses traversées de rayons:
une lettre (rayon, j, sens) avec sens = +1 pour une traversée de gauche à droite (S_{j-1} -> S_j).

Coordonnées: u_j et d_j comptent les traversées de U_j et D_j, beta_j les passages de part en part
de la bande S_j (beta_0 = beta_m = 0). Le vecteur est

    (a_2, ..., a_{m-1}, b_1, ..., b_{m-2})    a_i = (u_i - d_i) / 2,  b_i = (beta_i - beta_{i+1}) / 2

de longueur 2n - 6. Il est additif sur les unions disjointes. Ajouter une courbe parallèle au bord
ne change pas le vecteur: la reconstruction choisit le plus petit beta_1 réalisable, ce qui écarte
ces composantes et les composantes périphériques.

Les demi-twists agissent via le groupe libre engendré par les lacets x_j (arbre couvrant des
rayons U): sigma_i envoie x_i sur x_i x_{i+1} x_i^-1 et x_{i+1} sur x_i.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from dagster import get_dagster_logger

from pants_lab.topology.errors import EngineError, InvalidCoordinatesError

logger = get_dagster_logger()

ENGINE_VERSION = 1
SUPPORTED_PUNCTURES = range(4, 8)
MAX_LOOKAHEAD = 3

Letter = Tuple[str, int, int]
Word = Tuple[Letter, ...]
Point = Tuple[str, int, int]


@dataclass(frozen=True)
class SurfaceSpec:
    """
    Sphère à n trous, n entre 4 et 7.
    """
    punctures: int
    genus: int = 0

    def __post_init__(self):
        if self.genus != 0:
            raise InvalidCoordinatesError("Seules les surfaces planaires sont prises en charge")
        if self.punctures not in SUPPORTED_PUNCTURES:
            raise InvalidCoordinatesError(
                f"Nombre de trous non pris en charge: {self.punctures} (attendu 4 à 7)"
            )

    @property
    def disk_punctures(self) -> int:
        return self.punctures - 1

    @property
    def xi(self) -> int:
        return self.punctures - 3

    @property
    def vector_length(self) -> int:
        return 2 * self.punctures - 6

    @property
    def chi_bar(self) -> int:
        return self.punctures - 2


@dataclass(frozen=True, order=True)
class CurveCoords:
    """
    Classe d'isotopie d'une multicourbe, donnée par son vecteur canonique.
    """
    surface: SurfaceSpec
    vector: Tuple[int, ...]

    def __post_init__(self):
        if len(self.vector) != self.surface.vector_length:
            raise InvalidCoordinatesError(
                f"Vecteur de longueur {len(self.vector)}, {self.surface.vector_length} attendu"
            )
        if not any(self.vector):
            raise InvalidCoordinatesError("Le vecteur nul ne représente aucune courbe essentielle")

    @property
    def norm(self) -> int:
        return max(abs(value) for value in self.vector)

    def __str__(self) -> str:
        return "(" + ",".join(str(value) for value in self.vector) + ")"


@dataclass(frozen=True)
class MCGWord:
    """
    Mot en demi-twists signés, appliqués de gauche à droite.
    """
    surface: SurfaceSpec
    letters: Tuple[int, ...]

    def __post_init__(self):
        for letter in self.letters:
            _check_generator(self.surface, letter)

    def inverse(self) -> "MCGWord":
        return MCGWord(self.surface, tuple(-letter for letter in reversed(self.letters)))


def _check_generator(surface: SurfaceSpec, g: int) -> None:
    if g == 0 or abs(g) >= surface.disk_punctures:
        raise InvalidCoordinatesError(
            f"Générateur {g} hors de l'intervalle ±1..±{surface.disk_punctures - 1}"
        )


# ---------------------------------------------------------------------------
# Mots de traversées
# ---------------------------------------------------------------------------

def _inverse_letter(letter: Letter) -> Letter:
    return letter[0], letter[1], -letter[2]


def invert_word(word: Sequence[Letter]) -> Word:
    return tuple(_inverse_letter(letter) for letter in reversed(word))


def reduce_word(word: Iterable[Letter]) -> Word:
    """
    Réduction libre puis cyclique d'un chemin fermé de bandes.
    """
    stack: List[Letter] = []
    for letter in word:
        if stack and stack[-1] == _inverse_letter(letter):
            stack.pop()
        else:
            stack.append(letter)
    start, end = 0, len(stack)
    while end - start >= 2 and stack[start] == _inverse_letter(stack[end - 1]):
        start += 1
        end -= 1
    return tuple(stack[start:end])


def canonical_cyclic(word: Sequence[Letter]) -> Word:
    """Représentant minimal à rotation et inversion près."""
    if not word:
        return ()
    candidates = []
    for oriented in (tuple(word), invert_word(word)):
        candidates.extend(oriented[r:] + oriented[:r] for r in range(len(oriented)))
    return min(candidates)


def _strip_after(letter: Letter) -> int:
    _, j, sign = letter
    return j if sign > 0 else j - 1


def _strip_before(letter: Letter) -> int:
    _, j, sign = letter
    return j - 1 if sign > 0 else j


def check_closed_path(word: Sequence[Letter], m: int) -> None:
    if not word:
        raise InvalidCoordinatesError("Mot vide")
    for ray, j, sign in word:
        if ray not in ("U", "D") or not 1 <= j <= m or sign not in (1, -1):
            raise InvalidCoordinatesError(f"Lettre invalide {(ray, j, sign)}")
    for letter, following in zip(word, tuple(word[1:]) + (word[0],)):
        if _strip_after(letter) != _strip_before(following):
            raise InvalidCoordinatesError(f"Mot discontinu entre {letter} et {following}")


def crossing_profile(word: Sequence[Letter], m: int) -> Tuple[List[int], List[int], List[int]]:
    """
    Comptes (u, d, beta) d'un mot cyclique; listes indexées de 0 à m.
    """
    u, d, beta = [0] * (m + 1), [0] * (m + 1), [0] * (m + 1)
    size = len(word)
    for position, (ray, j, sign) in enumerate(word):
        (u if ray == "U" else d)[j] += 1
        _, next_j, next_sign = word[(position + 1) % size]
        if sign == next_sign == 1 and next_j == j + 1:
            beta[j] += 1
        elif sign == next_sign == -1 and next_j == j - 1:
            beta[next_j] += 1
    return u, d, beta


def word_vector(word: Sequence[Letter], m: int) -> Tuple[int, ...]:
    u, d, beta = crossing_profile(word, m)
    a = [(u[i] - d[i]) // 2 for i in range(2, m)]
    b = [(beta[i] - beta[i + 1]) // 2 for i in range(1, m - 1)]
    return tuple(a + b)


def enclosed_by_word(word: Sequence[Letter], m: int) -> Tuple[int, ...]:
    """Piqûres du disque entourées: celles dont le rayon D est traversé un nombre impair de fois."""
    _, d, _ = crossing_profile(word, m)
    return tuple(j for j in range(1, m + 1) if d[j] % 2)


# ---------------------------------------------------------------------------
# Reconstruction du diagramme
# ---------------------------------------------------------------------------

def _valid_counts(a: List[int], beta: List[int], m: int) -> Optional[Tuple[List[int], List[int], List[int]]]:
    s, u, d = [0] * (m + 1), [0] * (m + 1), [0] * (m + 1)
    for i in range(1, m + 1):
        s[i] = max(beta[i - 1], beta[i])
        u[i] = s[i] // 2 + a[i]
        d[i] = s[i] // 2 - a[i]
        if u[i] < 0 or d[i] < 0:
            return None
    for i in range(1, m):
        left = (s[i] - beta[i]) // 2
        right = (s[i + 1] - beta[i]) // 2
        if min(u[i] - left, d[i] - left, u[i + 1] - right, d[i + 1] - right) < 0:
            return None
    return u, d, beta


def diagram_counts(vector: Sequence[int], m: int) -> Tuple[List[int], List[int], List[int]]:
    """
    Comptes (u, d, beta) du diagramme réalisant le vecteur, avec beta_1 minimal.
    """
    if len(vector) != 2 * m - 4:
        raise InvalidCoordinatesError(f"Vecteur de longueur {len(vector)}, {2 * m - 4} attendu")
    a = [0] * (m + 1)
    a[2:m] = vector[:m - 2]
    b = vector[m - 2:]
    offsets = [0] * (m + 1)
    for j in range(2, m):
        offsets[j] = offsets[j - 1] + 2 * b[j - 2]
    low = max([0] + offsets[1:m])
    budget = low + 4 * (sum(abs(value) for value in vector) + 2)
    for beta_1 in range(low, budget + 1, 2):
        beta = [0] * (m + 1)
        for j in range(1, m):
            beta[j] = beta_1 - offsets[j]
        counts = _valid_counts(a, beta, m)
        if counts is not None:
            return counts
    raise InvalidCoordinatesError(f"Coordonnées non réalisables: {tuple(vector)}")


def _strip_arcs(u: List[int], d: List[int], beta: List[int], m: int) -> Tuple[Dict[Point, Point], Dict[Point, Point]]:
    """
    Arcs de chaque bande. right[p] est l'autre extrémité de l'arc qui part de p vers la droite.
    Les points d'un rayon sont numérotés depuis la piqûre vers le bord.
    """
    right: Dict[Point, Point] = {}
    left: Dict[Point, Point] = {}
    for t in range(u[1]):
        left[("U", 1, t)], left[("D", 1, t)] = ("D", 1, t), ("U", 1, t)
    for t in range(u[m]):
        right[("U", m, t)], right[("D", m, t)] = ("D", m, t), ("U", m, t)
    for i in range(1, m):
        s_left, s_right = max(beta[i - 1], beta[i]), max(beta[i], beta[i + 1])
        turns_left, turns_right = (s_left - beta[i]) // 2, (s_right - beta[i]) // 2
        for t in range(turns_left):
            right[("U", i, t)], right[("D", i, t)] = ("D", i, t), ("U", i, t)
        for t in range(turns_right):
            left[("U", i + 1, t)], left[("D", i + 1, t)] = ("D", i + 1, t), ("U", i + 1, t)
        # passages appariés de haut en bas
        left_side = [("U", i, t) for t in range(u[i] - 1, turns_left - 1, -1)]
        left_side += [("D", i, t) for t in range(turns_left, d[i])]
        right_side = [("U", i + 1, t) for t in range(u[i + 1] - 1, turns_right - 1, -1)]
        right_side += [("D", i + 1, t) for t in range(turns_right, d[i + 1])]
        if len(left_side) != len(right_side):
            raise EngineError(f"Bande S_{i}: {len(left_side)} et {len(right_side)} extrémités de passages")
        for p, q in zip(left_side, right_side):
            right[p] = q
            left[q] = p
    return right, left


def _trace(u: List[int], d: List[int], beta: List[int], m: int) -> List[Word]:
    right, left = _strip_arcs(u, d, beta, m)
    points = [("U", j, t) for j in range(1, m + 1) for t in range(u[j])]
    points += [("D", j, t) for j in range(1, m + 1) for t in range(d[j])]
    visited: Set[Point] = set()
    words: List[Word] = []
    for start in points:
        if start in visited:
            continue
        word: List[Letter] = []
        point, direction = start, 1
        while True:
            if point in visited:
                raise EngineError(f"Diagramme incohérent au point {point}")
            visited.add(point)
            ray, j, _ = point
            word.append((ray, j, direction))
            following = right[point] if direction == 1 else left[point]
            if direction == 1:
                direction = 1 if following[1] == j + 1 else -1
            else:
                direction = -1 if following[1] == j - 1 else 1
            point = following
            if point == start:
                break
        words.append(tuple(word))
    return words


@lru_cache(maxsize=65536)
def _components_cached(punctures: int, vector: Tuple[int, ...]) -> Tuple[Tuple[Word, Tuple[int, ...], int], ...]:
    m = punctures - 1
    u, d, beta = diagram_counts(vector, m)
    result = []
    for word in _trace(u, d, beta, m):
        result.append((canonical_cyclic(word), word_vector(word, m), len(enclosed_by_word(word, m))))
    return tuple(sorted(result, key=lambda item: item[1]))


def components(c: CurveCoords) -> List[Tuple[CurveCoords, int]]:
    """
    Composantes connexes de la multicourbe avec le nombre de piqûres qu'elles entourent.
    """
    try:
        parts = _components_cached(c.surface.punctures, c.vector)
    except InvalidCoordinatesError as e:
        logger.error(f"Reconstruction impossible pour {c}: {e}")
        raise
    return [(CurveCoords(c.surface, vector), enclosed) for _, vector, enclosed in parts]


def component_words(c: CurveCoords) -> List[Word]:
    return [word for word, _, _ in _components_cached(c.surface.punctures, c.vector)]


def is_single_curve(c: CurveCoords) -> bool:
    try:
        return len(_components_cached(c.surface.punctures, c.vector)) == 1
    except InvalidCoordinatesError:
        return False


def to_word(c: CurveCoords) -> Word:
    words = component_words(c)
    if len(words) != 1:
        raise InvalidCoordinatesError(f"{c} a {len(words)} composantes")
    return words[0]


def from_word(surface: SurfaceSpec, word: Sequence[Letter]) -> CurveCoords:
    """
    Coordonnées de la courbe décrite par un mot de traversées.
    """
    m = surface.disk_punctures
    check_closed_path(word, m)
    reduced = reduce_word(word)
    if not reduced:
        raise InvalidCoordinatesError("Le mot décrit une courbe triviale")
    return CurveCoords(surface, word_vector(reduced, m))


def is_simple_word(surface: SurfaceSpec, word: Sequence[Letter]) -> bool:
    """
    Vrai si le mot est une seule courbe simple représentable (ni triviale, ni périphérique).
    """
    m = surface.disk_punctures
    reduced = reduce_word(word)
    if not reduced:
        return False
    vector = word_vector(reduced, m)
    if not any(vector):
        return False
    try:
        parts = _components_cached(surface.punctures, vector)
    except InvalidCoordinatesError:
        return False
    return len(parts) == 1 and parts[0][0] == canonical_cyclic(reduced)


def is_essential(c: CurveCoords, surface: SurfaceSpec) -> bool:
    """
    Une courbe est essentielle si elle entoure entre 2 et n - 2 piqûres du disque.
    """
    parts = components(c)
    if len(parts) != 1:
        raise InvalidCoordinatesError(f"{c} n'est pas une courbe unique ({len(parts)} composantes)")
    _, enclosed = parts[0]
    return 2 <= enclosed <= surface.punctures - 2


def enclosed_punctures(c: CurveCoords) -> Tuple[int, ...]:
    return enclosed_by_word(to_word(c), c.surface.disk_punctures)


# ---------------------------------------------------------------------------
# Courbes standard
# ---------------------------------------------------------------------------

def round_word(s: int, t: int) -> Word:
    return tuple([("U", j, 1) for j in range(s, t + 1)] + [("D", j, -1) for j in range(t, s - 1, -1)])


def round_curve(surface: SurfaceSpec, s: int, t: int) -> CurveCoords:
    """
    Courbe ronde entourant les piqûres s..t.
    """
    m = surface.disk_punctures
    if not 1 <= s < t <= m or t - s + 1 > m - 1:
        raise InvalidCoordinatesError(f"Intervalle {s}..{t} sans courbe ronde essentielle pour m = {m}")
    return CurveCoords(surface, word_vector(round_word(s, t), m))


def arched_word(punctures: Sequence[int]) -> Word:
    chosen = sorted(set(punctures))
    low, high = chosen[0], chosen[-1]
    top = [("U", j, 1) for j in range(low, high + 1)]
    bottom = [("D" if j in chosen else "U", j, -1) for j in range(high, low - 1, -1)]
    return tuple(top + bottom)


def curve_enclosing(surface: SurfaceSpec, punctures: Iterable[int]) -> CurveCoords:
    """
    Courbe en arche: entoure les piqûres données et passe au-dessus des autres piqûres intermédiaires.
    """
    chosen = sorted(set(punctures))
    m = surface.disk_punctures
    if len(chosen) < 2 or len(chosen) > m - 1 or chosen[0] < 1 or chosen[-1] > m:
        raise InvalidCoordinatesError(f"Ensemble {chosen} sans courbe essentielle pour m = {m}")
    return from_word(surface, arched_word(chosen))


# ---------------------------------------------------------------------------
# Action des demi-twists
# ---------------------------------------------------------------------------

def _loop(j: int, sign: int) -> List[Letter]:
    """Lacet x_j^sign basé dans S_0 et relevé en lettres de traversées."""
    path = [("U", i, 1) for i in range(1, j)] + [("D", j, 1), ("U", j, -1)]
    path += [("U", i, -1) for i in range(j - 1, 0, -1)]
    return path if sign == 1 else list(invert_word(path))


def _artin_image(j: int, sign: int, g: int) -> List[Tuple[int, int]]:
    i = abs(g)
    if g > 0:
        images = {i: [(i, 1), (i + 1, 1), (i, -1)], i + 1: [(i, 1)]}
    else:
        images = {i: [(i + 1, 1)], i + 1: [(i + 1, -1), (i, 1), (i + 1, 1)]}
    image = images.get(j, [(j, 1)])
    if sign == -1:
        image = [(k, -e) for k, e in reversed(image)]
    return image


def act_on_word(word: Sequence[Letter], g: int) -> Word:
    """
    Image d'un mot cyclique par le demi-twist signé g.
    """
    path: List[Letter] = []
    for ray, j, sign in word:
        if ray != "D":
            continue
        for k, e in _artin_image(j, sign, g):
            path.extend(_loop(k, e))
    return reduce_word(path)


def apply_generator(c: CurveCoords, g: int) -> CurveCoords:
    """
    Coordonnées de l'image de la multicourbe par le générateur g (g < 0 pour l'inverse).
    """
    _check_generator(c.surface, g)
    m = c.surface.disk_punctures
    total = [0] * c.surface.vector_length
    for word in component_words(c):
        image = word_vector(act_on_word(word, g), m)
        total = [x + y for x, y in zip(total, image)]
    return CurveCoords(c.surface, tuple(total))


def apply_word(c: CurveCoords, word: MCGWord) -> CurveCoords:
    for g in word.letters:
        c = apply_generator(c, g)
    return c


# ---------------------------------------------------------------------------
# Nombres d'intersection
# ---------------------------------------------------------------------------

def round_interval(word: Sequence[Letter], m: int) -> Optional[Tuple[int, int]]:
    """
    Intervalle (s, t) si le mot est la courbe ronde autour de s..t, sinon None.
    """
    enclosed = enclosed_by_word(word, m)
    if len(enclosed) < 2 or len(word) != 2 * len(enclosed):
        return None
    if enclosed[-1] - enclosed[0] + 1 != len(enclosed):
        return None
    return enclosed[0], enclosed[-1]


def line_crossings(word: Sequence[Letter], strip: int) -> List[Tuple[int, int]]:
    """
    Traversées de la verticale médiane d'une bande: (position de la lettre précédente, sens).
    """
    size = len(word)
    found = []
    for position, (_, j, sign) in enumerate(word):
        _, next_j, next_sign = word[(position + 1) % size]
        if sign == next_sign == 1 and next_j == j + 1 and j == strip:
            found.append((position, 1))
        elif sign == next_sign == -1 and next_j == j - 1 and next_j == strip:
            found.append((position, -1))
    return found


def bigon_segments(word: Sequence[Letter], s: int, t: int) -> Tuple[List[Tuple[int, str, int]], Set[int]]:
    """
    Traversées de la courbe ronde autour de s..t (verticales des bandes S_{s-1} et S_t) et indices
    des traversées qui bordent un bigone.

    Un segment intérieur borde un bigone quand toutes les piqûres s..t sont du même côté de lui,
    c'est-à-dire quand les parités des traversées de D_s..D_t sont égales.
    """
    crossings = [(pos, "L", sign) for pos, sign in line_crossings(word, s - 1)]
    crossings += [(pos, "R", sign) for pos, sign in line_crossings(word, t)]
    crossings.sort()
    removed: Set[int] = set()
    size = len(word)
    count = len(crossings)
    for index, (position, line, sign) in enumerate(crossings):
        entering = (line == "L" and sign == 1) or (line == "R" and sign == -1)
        if not entering:
            continue
        end = crossings[(index + 1) % count][0]
        length = (end - position) % size or size
        parity = {j: 0 for j in range(s, t + 1)}
        for offset in range(1, length + 1):
            ray, j, _ = word[(position + offset) % size]
            if j < s or j > t:
                raise EngineError(f"Segment intérieur sortant de l'intervalle {s}..{t}")
            if ray == "D":
                parity[j] ^= 1
        if len(set(parity.values())) == 1:
            removed.update({index, (index + 1) % count})
    return crossings, removed


def round_intersection(s: int, t: int, word: Sequence[Letter]) -> int:
    """
    Intersection géométrique de la courbe ronde autour de s..t avec une courbe donnée par son mot.
    """
    crossings, removed = bigon_segments(word, s, t)
    value = len(crossings) - len(removed)
    if value < 0 or value % 2:
        raise EngineError(f"Intersection impaire ou négative ({value}) avec la courbe ronde {s}..{t}")
    return value


@lru_cache(maxsize=None)
def _moves(m: int) -> Tuple[Tuple[int, ...], ...]:
    """Demi-twists d'Artin puis demi-twists de bande entre piqûres non voisines."""
    moves: List[Tuple[int, ...]] = []
    for i in range(1, m):
        moves.extend([(i,), (-i,)])
    for i in range(1, m):
        for j in range(i + 2, m + 1):
            path = tuple(range(i + 1, j))
            back = tuple(-g for g in reversed(path))
            moves.extend([back + (i,) + path, back + (-i,) + path])
    return tuple(moves)


def _apply_sequence(word: Word, sequence: Sequence[int]) -> Word:
    for g in sequence:
        word = act_on_word(word, g)
    return word


def _best_descent(word: Word, m: int, depth: int) -> Optional[Tuple[Tuple[int, ...], Word]]:
    frontier: List[Tuple[Tuple[int, ...], Word]] = [((), word)]
    for _ in range(depth):
        frontier = [
            (sequence + move, _apply_sequence(current, move))
            for sequence, current in frontier
            for move in _moves(m)
        ]
    best = None
    for sequence, current in frontier:
        if len(current) < len(word) and (best is None or len(current) < len(best[1])):
            best = (sequence, current)
    return best


@lru_cache(maxsize=16384)
def reduce_to_round(punctures: int, vector: Tuple[int, ...]) -> Tuple[Tuple[int, ...], Tuple[int, int]]:
    """
    Mot de demi-twists w qui envoie la courbe sur une courbe ronde, par descente stricte de la
    longueur du mot de traversées. Le nombre d'étapes est borné par la longueur initiale.
    """
    m = punctures - 1
    parts = _components_cached(punctures, vector)
    if len(parts) != 1:
        raise InvalidCoordinatesError(f"La réduction demande une courbe unique, {len(parts)} composantes")
    word = parts[0][0]
    applied: List[int] = []
    initial = len(word)
    while True:
        interval = round_interval(word, m)
        if interval is not None:
            return tuple(applied), interval
        best = None
        for depth in range(1, MAX_LOOKAHEAD + 1):
            best = _best_descent(word, m, depth)
            if best is not None:
                break
        if best is None:
            logger.error(f"Descente bloquée pour {vector} à la longueur {len(word)}")
            raise EngineError(f"Aucune descente de longueur trouvée pour {vector}")
        sequence, word = best
        applied.extend(sequence)
        if len(applied) > initial * 3 * MAX_LOOKAHEAD * m:
            raise EngineError(f"La descente dépasse la borne d'étapes pour {vector}")


def intersection_number(a: CurveCoords, b: CurveCoords) -> int:
    """
    Nombre d'intersection géométrique: a est ramenée à une courbe ronde par un mot w, puis on lit
    i(w(a), w(b)) sur le mot de w(b).
    """
    if a.surface != b.surface:
        raise InvalidCoordinatesError("Courbes de surfaces différentes")
    if a == b:
        return 0
    sequence, (s, t) = reduce_to_round(a.surface.punctures, a.vector)
    total = 0
    for word in component_words(b):
        total += round_intersection(s, t, _apply_sequence(word, sequence))
    return total
