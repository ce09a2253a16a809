"""
Ressource pour le cache des catalogues de courbes (fichiers texte versionnés).
"""

import os
from typing import Optional, Sequence

from dagster import ConfigurableResource, get_dagster_logger

from pants_lab.topology.errors import CatalogError
from pants_lab.topology.lamination_engine import ENGINE_VERSION, CurveCoords, SurfaceSpec
from pants_lab.topology.pants_complex import CurveCatalog, build_catalog

logger = get_dagster_logger()

CACHE_VERSION = 1
HEADER = "# pants_lab curve catalog"


def dump_catalog(catalog: CurveCatalog) -> str:
    """
    Sérialise un catalogue: en-tête, une ligne par courbe puis les triplets non nuls.
    """
    lines = [
        HEADER,
        f"version {CACHE_VERSION}",
        f"engine {ENGINE_VERSION}",
        f"surface 0 {catalog.surface.punctures}",
        f"norm {catalog.norm_bound}",
        f"curves {len(catalog.curves)}",
    ]
    lines += [" ".join(str(value) for value in c.vector) for c in catalog.curves]
    lines.append(f"triples {len(catalog.matrix)}")
    lines += [f"{i} {j} {value}" for (i, j), value in sorted(catalog.matrix.items())]
    return "\n".join(lines) + "\n"


def _field(line: str, name: str) -> list:
    parts = line.split()
    if not parts or parts[0] != name:
        raise CatalogError(f"Champ '{name}' attendu, reçu '{line}'")
    return parts[1:]


def parse_catalog(text: str) -> CurveCatalog:
    """
    Relit un catalogue sérialisé par dump_catalog.
    """
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise CatalogError("En-tête de catalogue absent")
    try:
        version = int(_field(lines[1], "version")[0])
        engine = int(_field(lines[2], "engine")[0])
        genus, punctures = (int(value) for value in _field(lines[3], "surface"))
        norm_bound = int(_field(lines[4], "norm")[0])
        count = int(_field(lines[5], "curves")[0])
    except (IndexError, ValueError) as e:
        raise CatalogError(f"En-tête de catalogue illisible: {e}") from e
    if version != CACHE_VERSION:
        raise CatalogError(f"Version de cache {version} non supportée")
    if engine != ENGINE_VERSION:
        raise CatalogError(f"Catalogue produit par le moteur {engine}, moteur courant {ENGINE_VERSION}")
    surface = SurfaceSpec(punctures, genus)
    body = lines[6:]
    if len(body) < count + 1:
        raise CatalogError("Catalogue tronqué")
    curves = tuple(CurveCoords(surface, tuple(int(value) for value in line.split())) for line in body[:count])
    triples = int(_field(body[count], "triples")[0])
    rows = body[count + 1:]
    if len(rows) != triples:
        raise CatalogError(f"{triples} triplets annoncés, {len(rows)} lus")
    matrix = {}
    for row in rows:
        i, j, value = (int(token) for token in row.split())
        if not 0 <= i < j < count:
            raise CatalogError(f"Triplet hors bornes: {row}")
        matrix[(i, j)] = value
    return CurveCatalog(surface, norm_bound, curves, matrix)


class CatalogCacheResource(ConfigurableResource):
    """
    Ressource pour construire, écrire et relire les catalogues de courbes.
    """
    cache_dir: str = "pants_lab/data/cache"

    def path_for(self, punctures: int, norm_bound: int) -> str:
        return os.path.join(self.cache_dir, f"catalog_n{punctures}_N{norm_bound}.txt")

    def load(self, surface: SurfaceSpec, norm_bound: int) -> Optional[CurveCatalog]:
        """
        Relit le catalogue en cache; None si absent ou produit par un autre moteur.
        """
        path = self.path_for(surface.punctures, norm_bound)
        if not os.path.exists(path):
            return None
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
        try:
            catalog = parse_catalog(text)
        except CatalogError as e:
            if "moteur" in str(e):
                logger.warning(f"Cache périmé ignoré: {path}")
                return None
            logger.error(f"Cache illisible {path}: {e}")
            raise
        if catalog.surface != surface or catalog.norm_bound != norm_bound:
            logger.error(f"Le cache {path} ne correspond pas à Sigma_0,{surface.punctures} norme {norm_bound}")
            raise CatalogError(f"Cache incohérent: {path}")
        logger.info(f"Catalogue relu depuis {path} ({len(catalog)} courbes)")
        return catalog

    def save(self, catalog: CurveCatalog) -> str:
        os.makedirs(self.cache_dir, exist_ok=True)
        path = self.path_for(catalog.surface.punctures, catalog.norm_bound)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(dump_catalog(catalog))
        logger.info(f"Catalogue écrit dans {path}")
        return path

    def get_or_build(self, surface: SurfaceSpec, norm_bound: int, extra_curves: Sequence[CurveCoords] = ()) -> CurveCatalog:
        """
        Catalogue de base en cache ou construit; les courbes supplémentaires ne sont jamais mises en cache.
        """
        if extra_curves:
            return build_catalog(surface, norm_bound, extra_curves)
        catalog = self.load(surface, norm_bound)
        if catalog is None:
            catalog = build_catalog(surface, norm_bound)
            self.save(catalog)
        return catalog
