"""
Écriture des rapports d'audit: JSON structuré et tableau TSV.
"""

import json
import os
from datetime import datetime, timezone
from typing import Any, Dict, Optional, Tuple

import pandas as pd
from dagster import get_dagster_logger

from pants_lab.topology.audits import AuditReport
from pants_lab.topology.errors import LabConfigError
from pants_lab.topology.lamination_engine import ENGINE_VERSION

logger = get_dagster_logger()


def report_to_dict(report: AuditReport, generated_at: Optional[str] = None) -> Dict[str, Any]:
    return {
        "kind": report.kind,
        "engine_version": ENGINE_VERSION,
        "generated_at": generated_at or datetime.now(timezone.utc).replace(microsecond=0).isoformat(),
        "parameters": report.parameters,
        "records": report.records,
        "summary": report.summary(),
    }


def records_frame(payload: Dict[str, Any]) -> pd.DataFrame:
    """
    Une ligne par enregistrement; les listes sont aplaties en texte JSON.
    """
    frame = pd.DataFrame(payload["records"])
    for column in frame.columns:
        frame[column] = frame[column].map(lambda value: json.dumps(value) if isinstance(value, list) else value)
    return frame


def write_tsv(payload: Dict[str, Any], path: str) -> str:
    frame = records_frame(payload)
    if frame.empty:
        logger.warning(f"Rapport {payload['kind']} sans enregistrement")
    frame.to_csv(path, sep="\t", index=False)
    return path


def write_report(report: AuditReport, output_dir: str, generated_at: Optional[str] = None) -> Tuple[str, str, Dict[str, Any]]:
    """
    Écrit {kind}_report.json et {kind}_summary.tsv dans output_dir.

    Returns:
        Chemins JSON et TSV, et le contenu du rapport.
    """
    os.makedirs(output_dir, exist_ok=True)
    payload = report_to_dict(report, generated_at)
    stem = f"{report.kind}_n{report.parameters['punctures']}"
    json_path = os.path.join(output_dir, f"{stem}_report.json")
    with open(json_path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")
    tsv_path = write_tsv(payload, os.path.join(output_dir, f"{stem}_summary.tsv"))
    logger.info(f"Rapport {report.kind} écrit: {json_path} ({payload['summary']['verdict']})")
    return json_path, tsv_path, payload


def read_report(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Impossible de lire le rapport {path}: {e}")
        raise LabConfigError(f"Rapport illisible: {path}") from e
    missing = {"kind", "parameters", "records", "summary"} - set(payload)
    if missing:
        raise LabConfigError(f"Rapport incomplet, clés manquantes: {sorted(missing)}")
    return payload
