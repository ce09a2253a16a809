"""
Assets Dagster du laboratoire: catalogue de courbes, audits et résumé.
"""

from typing import Any, Dict

import pandas as pd
from dagster import AssetExecutionContext, asset

from pants_lab.topology.audits import convexity_audit, flat_audit, flat_catalog, lipschitz_audit
from pants_lab.topology.errors import LabError
from pants_lab.topology.pants_complex import CurveCatalog
from pants_lab.utils.reports import write_report


@asset(
    description="Construit ou relit le catalogue des courbes de norme bornée et leur matrice d'intersection",
    group_name="catalog",
    required_resource_keys={"catalog_cache_resource", "lab_settings"},
)
def curve_catalog(context: AssetExecutionContext) -> CurveCatalog:
    """
    Catalogue de Sigma_0,n pour la norme configurée, via le cache.
    """
    settings = context.resources.lab_settings.validate()
    catalog = context.resources.catalog_cache_resource.get_or_build(settings.surface(), settings.norm_bound)
    context.log.info(f"Catalogue: {len(catalog)} courbes, {len(catalog.matrix)} intersections non nulles")
    return catalog


def _publish(context: AssetExecutionContext, report) -> Dict[str, Any]:
    settings = context.resources.lab_settings
    _, _, payload = write_report(report, settings.output_dir)
    context.resources.duckdb_resource.store_report(context.run_id, payload)
    summary = payload["summary"]
    context.log.info(f"Verdict {report.kind}: {summary['verdict']} ({summary['records']} enregistrements)")
    return summary


@asset(
    description="Audit de convexité de P_Q: distances du catalogue et géodésiques minimales",
    group_name="audits",
    required_resource_keys={"lab_settings", "duckdb_resource"},
)
def convexity_report(context: AssetExecutionContext, curve_catalog: CurveCatalog) -> Dict[str, Any]:
    settings = context.resources.lab_settings.validate()
    try:
        report = convexity_audit(
            settings.surface(),
            settings.multicurve(),
            curve_catalog,
            settings.pair_budget,
            settings.length_budget,
            settings.seed,
            settings.cap,
        )
    except LabError as e:
        context.log.error(f"Audit de convexité interrompu: {e}")
        raise
    return _publish(context, report)


@asset(
    description="Audit des plats: iota(Z^r) isométrique sur la grille {-N..N}^r",
    group_name="audits",
    required_resource_keys={"lab_settings", "duckdb_resource"},
)
def flat_report(context: AssetExecutionContext) -> Dict[str, Any]:
    """
    Le catalogue est complété par les courbes de la grille; il n'est pas mis en cache.
    """
    settings = context.resources.lab_settings.validate()
    Q = settings.multicurve()
    try:
        catalog = flat_catalog(settings.surface(), Q, settings.norm_bound, settings.grid_radius)
        report = flat_audit(settings.surface(), Q, catalog, settings.grid_radius)
    except LabError as e:
        context.log.error(f"Audit des plats interrompu: {e}")
        raise
    return _publish(context, report)


@asset(
    description="Audit lipschitzien: témoin q après commutation pour les chemins courts",
    group_name="audits",
    required_resource_keys={"lab_settings", "duckdb_resource"},
)
def lipschitz_report(context: AssetExecutionContext, curve_catalog: CurveCatalog) -> Dict[str, Any]:
    settings = context.resources.lab_settings.validate()
    try:
        report = lipschitz_audit(
            settings.surface(),
            settings.multicurve(),
            curve_catalog,
            settings.path_length,
            settings.path_budget,
            settings.seed,
        )
    except LabError as e:
        context.log.error(f"Audit lipschitzien interrompu: {e}")
        raise
    return _publish(context, report)


@asset(
    description="Résumé des audits stockés dans DuckDB",
    group_name="reporting",
    required_resource_keys={"duckdb_resource"},
)
def audit_summary(context: AssetExecutionContext) -> pd.DataFrame:
    summary = context.resources.duckdb_resource.get_audit_summary()
    if summary.empty:
        context.log.warning("Aucun audit enregistré")
    else:
        refuted = int((summary["verdict"] == "refuted").sum())
        context.log.info(f"{len(summary)} audits enregistrés, {refuted} réfutés")
    return summary
