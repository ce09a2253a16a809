"""
Jobs Dagster du laboratoire.
"""

from dagster import AssetSelection, define_asset_job

# Construction du catalogue
build_catalog_job = define_asset_job(
    name="build_catalog_job",
    description="[ÉTAPE 1] Construit ou relit le catalogue de courbes",
    selection=AssetSelection.groups("catalog") & AssetSelection.assets("curve_catalog"),
)

convexity_audit_job = define_asset_job(
    name="convexity_audit_job",
    description="[ÉTAPE 2] Audit de convexité de P_Q",
    selection=(AssetSelection.groups("catalog") & AssetSelection.assets("curve_catalog")) |
              (AssetSelection.groups("audits") & AssetSelection.assets("convexity_report")),
)

flat_audit_job = define_asset_job(
    name="flat_audit_job",
    description="[ÉTAPE 3] Audit des plats Z^r",
    selection=AssetSelection.groups("audits") & AssetSelection.assets("flat_report"),
)

lipschitz_audit_job = define_asset_job(
    name="lipschitz_audit_job",
    description="[ÉTAPE 4] Audit lipschitzien après commutation",
    selection=(AssetSelection.groups("catalog") & AssetSelection.assets("curve_catalog")) |
              (AssetSelection.groups("audits") & AssetSelection.assets("lipschitz_report")),
)

audit_summary_job = define_asset_job(
    name="audit_summary_job",
    description="[ÉTAPE 5] Résumé des audits enregistrés",
    selection=AssetSelection.groups("reporting"),
)
