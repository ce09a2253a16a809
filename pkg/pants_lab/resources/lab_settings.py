"""
Ressource de configuration des runs d'audit.
"""

import os
from typing import List

from dagster import ConfigurableResource, get_dagster_logger

from pants_lab.topology.errors import InvalidCoordinatesError, LabConfigError
from pants_lab.topology.lamination_engine import SUPPORTED_PUNCTURES, SurfaceSpec
from pants_lab.topology.pants_complex import MulticurveQ

logger = get_dagster_logger()

DEFAULT_Q_SETS = {4: [], 5: ["1,2"], 6: ["1,2,3"], 7: ["1,2,3", "4,5"]}

COMMANDS = ("build-catalog", "audit-convexity", "audit-flat", "audit-lipschitz", "farey-distance", "report")


def parse_puncture_set(text: str) -> List[int]:
    """'1,2,3' -> [1, 2, 3]."""
    try:
        return sorted({int(token) for token in text.split(",") if token.strip()})
    except ValueError:
        raise LabConfigError(f"Ensemble de piqûres illisible: '{text}'") from None


class LabSettings(ConfigurableResource):
    """
    Paramètres d'un run: surface, catalogue, multicourbe Q et budgets des audits.
    """
    command: str = "audit-convexity"
    punctures: int = 5
    norm_bound: int = 2
    q_sets: List[str] = ["1,2"]
    pair_budget: int = 100
    length_budget: int = 4
    grid_radius: int = 1
    path_length: int = 3
    path_budget: int = 50
    seed: int = 0
    cap: int = 1000
    output_dir: str = os.environ.get("PANTS_LAB_OUTPUT_DIR", "pants_lab/data/reports")

    def validate(self) -> "LabSettings":
        """
        Vérifie les plages supportées; lève LabConfigError sinon.
        """
        problems = []
        if self.command not in COMMANDS:
            problems.append(f"commande inconnue '{self.command}'")
        if self.punctures not in SUPPORTED_PUNCTURES:
            problems.append(f"n = {self.punctures} hors de {SUPPORTED_PUNCTURES.start}..{SUPPORTED_PUNCTURES.stop - 1}")
        if self.norm_bound < 1:
            problems.append(f"norme {self.norm_bound} < 1")
        for name in ("pair_budget", "length_budget", "path_length", "path_budget", "cap"):
            if getattr(self, name) < 1:
                problems.append(f"{name} = {getattr(self, name)} < 1")
        if self.grid_radius < 0:
            problems.append(f"grid_radius = {self.grid_radius} < 0")
        if not self.q_sets and self.punctures != 4:
            problems.append("aucune courbe dans Q")
        for text in self.q_sets:
            chosen = parse_puncture_set(text)
            if not chosen or chosen[0] < 1 or chosen[-1] > self.punctures - 1:
                problems.append(f"Q: {text} sort de 1..{self.punctures - 1}")
            elif not 2 <= len(chosen) <= self.punctures - 2:
                problems.append(f"Q: {text} doit contenir entre 2 et {self.punctures - 2} piqûres")
        if problems:
            message = "; ".join(problems)
            logger.error(f"Configuration invalide: {message}")
            raise LabConfigError(message)
        return self

    def surface(self) -> SurfaceSpec:
        return SurfaceSpec(self.punctures)

    def multicurve(self) -> MulticurveQ:
        try:
            return MulticurveQ.standard(self.surface(), [parse_puncture_set(text) for text in self.q_sets])
        except InvalidCoordinatesError as e:
            logger.error(f"Multicourbe Q invalide: {e}")
            raise LabConfigError(str(e)) from e
