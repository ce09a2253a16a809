"""
Laboratoire combinatoire pour les courbes, décompositions en pantalons et projections de
sous-surfaces, avec des audits de la convexité des produits de graphes de Farey.
"""

from pants_lab.definitions import defs
