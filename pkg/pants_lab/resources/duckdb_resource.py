"""
Ressource pour DuckDB: magasin des audits.
"""

import json
import os
from typing import Any, Dict

import duckdb
import pandas as pd
from dagster import ConfigurableResource, get_dagster_logger

logger = get_dagster_logger()

SUMMARY_COLUMNS = ["run_id", "kind", "surface", "q", "verdict", "pairs", "refutations", "incomplete", "generated_at"]


class DuckDBResource(ConfigurableResource):
    """
    Ressource pour stocker les rapports d'audit dans DuckDB.
    """
    database_path: str = "pants_lab/data/audits.duckdb"

    def _get_connection(self):
        """
        Établit une connexion à la base de données DuckDB.
        """
        directory = os.path.dirname(self.database_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        return duckdb.connect(self.database_path)

    def create_tables(self):
        """
        Crée les tables nécessaires dans la base de données.
        """
        with self._get_connection() as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS audit_runs (
                    run_id VARCHAR PRIMARY KEY,
                    kind VARCHAR,
                    surface VARCHAR,
                    q VARCHAR,
                    verdict VARCHAR,
                    pairs INTEGER,
                    refutations INTEGER,
                    incomplete INTEGER,
                    generated_at TIMESTAMP
                )
            """)
            conn.execute("""
                CREATE TABLE IF NOT EXISTS audit_records (
                    run_id VARCHAR,
                    record_index INTEGER,
                    payload VARCHAR,
                    PRIMARY KEY (run_id, record_index)
                )
            """)
            logger.info("Tables d'audit créées avec succès")

    def store_report(self, run_id: str, report: Dict[str, Any]) -> None:
        """
        Enregistre un rapport d'audit (dictionnaire JSON) et ses enregistrements.

        Args:
            run_id: Identifiant du run Dagster ou de la CLI.
            report: Rapport tel qu'écrit sur disque.
        """
        summary = report["summary"]
        parameters = report["parameters"]
        generated_at = pd.Timestamp(report["generated_at"])
        if generated_at.tzinfo is not None:
            generated_at = generated_at.tz_convert("UTC").tz_localize(None)
        runs = pd.DataFrame([{
            "run_id": run_id,
            "kind": report["kind"],
            "surface": f"0,{parameters['punctures']}",
            "q": parameters.get("q", ""),
            "verdict": summary["verdict"],
            "pairs": summary["records"],
            "refutations": summary["refutations"],
            "incomplete": summary["incomplete"],
            "generated_at": generated_at,
        }])
        records = pd.DataFrame({
            "run_id": run_id,
            "record_index": range(len(report["records"])),
            "payload": [json.dumps(record, sort_keys=True) for record in report["records"]],
        })

        self.create_tables()
        with self._get_connection() as conn:
            conn.register("temp_runs", runs)
            conn.execute("""
                INSERT OR REPLACE INTO audit_runs
                    (run_id, kind, surface, q, verdict, pairs, refutations, incomplete, generated_at)
                SELECT run_id, kind, surface, q, verdict, pairs, refutations, incomplete, generated_at
                FROM temp_runs
            """)
            if not records.empty:
                conn.register("temp_records", records)
                conn.execute("""
                    INSERT OR REPLACE INTO audit_records (run_id, record_index, payload)
                    SELECT run_id, record_index, payload FROM temp_records
                """)
            logger.info(f"Rapport {report['kind']} stocké ({len(records)} enregistrements) pour {run_id}")

    def get_audit_summary(self) -> pd.DataFrame:
        """
        Récupère le résumé des audits, du plus récent au plus ancien.

        Returns:
            DataFrame pandas contenant les résultats.
        """
        try:
            with self._get_connection() as conn:
                tables = [t[0] for t in conn.execute("SELECT table_name FROM duckdb_tables()").fetchall()]
                if "audit_runs" not in tables:
                    logger.warning("La table audit_runs n'existe pas encore")
                    return pd.DataFrame(columns=SUMMARY_COLUMNS)
                return conn.execute(
                    f"SELECT {', '.join(SUMMARY_COLUMNS)} FROM audit_runs ORDER BY generated_at DESC, run_id"
                ).df()
        except Exception as e:
            logger.error(f"Erreur lors de la lecture du résumé des audits : {e}")
            raise

    def get_records(self, run_id: str) -> pd.DataFrame:
        """
        Récupère les enregistrements d'un run, décodés.
        """
        with self._get_connection() as conn:
            frame = conn.execute(
                "SELECT record_index, payload FROM audit_records WHERE run_id = ? ORDER BY record_index",
                (run_id,),
            ).df()
        if frame.empty:
            logger.warning(f"Aucun enregistrement pour {run_id}")
            return frame
        return pd.json_normalize([json.loads(payload) for payload in frame["payload"]])
