"""
Module contenant les ressources Dagster du laboratoire.
"""

from pants_lab.resources.catalog_cache_resource import *  # noqa
from pants_lab.resources.duckdb_resource import *  # noqa
from pants_lab.resources.lab_settings import *  # noqa
