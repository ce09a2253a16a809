"""
Définitions Dagster du laboratoire.
"""

import os

from dagster import Definitions, load_assets_from_modules
from dotenv import load_dotenv

from pants_lab import assets, jobs
from pants_lab.resources.catalog_cache_resource import CatalogCacheResource
from pants_lab.resources.duckdb_resource import DuckDBResource
from pants_lab.resources.lab_settings import LabSettings

load_dotenv()

all_assets = load_assets_from_modules([assets])

resources = {
    "catalog_cache_resource": CatalogCacheResource(
        cache_dir=os.environ.get("PANTS_LAB_CACHE_DIR", "pants_lab/data/cache")
    ),
    "duckdb_resource": DuckDBResource(
        database_path=os.environ.get("PANTS_LAB_DUCKDB_PATH", "pants_lab/data/audits.duckdb")
    ),
    "lab_settings": LabSettings(),
}

defs = Definitions(
    assets=all_assets,
    jobs=[
        jobs.build_catalog_job,
        jobs.convexity_audit_job,
        jobs.flat_audit_job,
        jobs.lipschitz_audit_job,
        jobs.audit_summary_job,
    ],
    resources=resources,
)
