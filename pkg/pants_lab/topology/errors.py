"""
Hiérarchie d'exceptions du laboratoire.

Les moteurs lèvent ces exceptions; la couche d'orchestration les journalise puis les relance.
"""


class LabError(Exception):
    """Racine de toutes les erreurs du laboratoire."""


class InvalidSlopeError(LabError, ValueError):
    """Pente invalide, par exemple (0, 0) ou un texte mal formé."""


class WindowMismatchError(LabError, ValueError):
    """Opération mélangeant des données de deux fenêtres différentes."""


class InvalidCoordinatesError(LabError, ValueError):
    """Vecteur de coordonnées non réalisable, générateur hors bornes ou surface non supportée."""


class NotInWindowError(LabError, ValueError):
    """La courbe n'est pas contenue dans la fenêtre demandée."""


class CatalogError(LabError, KeyError):
    """Sommet ou courbe hors du catalogue, ou fichier de cache invalide."""


class DecompositionError(LabError, ValueError):
    """Complexe cornu ou bibliothèque d'instances incohérents."""


class EngineError(LabError, RuntimeError):
    """Invariant interne violé: signale un bogue du moteur, jamais une erreur d'utilisation."""


class LabConfigError(LabError, ValueError):
    """Configuration d'exécution hors des plages supportées."""
