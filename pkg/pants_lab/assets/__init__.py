"""
Module contenant les assets Dagster du laboratoire.
"""

from pants_lab.assets.lab_assets import *  # noqa
