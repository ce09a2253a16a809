"""
Tests de la ligne de commande et de l'écriture des rapports.
"""

import json
import os
from unittest.mock import patch

import pytest

from pants_lab.__main__ import EXIT_CONFIG, EXIT_INCOMPLETE, EXIT_OK, EXIT_REFUTED, main
from pants_lab.topology.audits import AuditReport
from pants_lab.topology.errors import CatalogError, LabConfigError
from pants_lab.topology.window_models import load_rule_table
from pants_lab.utils.reports import read_report, records_frame, write_report


def make_report(verdict):
    return AuditReport(
        "convexity",
        {"punctures": 5, "q": "1,2"},
        [{"endpoints": [[[0, 0, 1, 0]], [[0, 0, 0, 1]]], "d_Q": 1, "verdict": verdict}],
    )


# Tests pour les rapports
def test_write_report(tmp_path):
    """Teste l'écriture JSON et TSV"""
    json_path, tsv_path, payload = write_report(make_report("refuted"), str(tmp_path), "2026-01-01T00:00:00+00:00")
    assert os.path.basename(json_path) == "convexity_n5_report.json"
    assert os.path.basename(tsv_path) == "convexity_n5_summary.tsv"
    with open(json_path, encoding="utf-8") as handle:
        text = handle.read()
    assert text.index('"engine_version"') < text.index('"generated_at"') < text.index('"kind"')
    assert json.loads(text) == payload
    assert payload["summary"]["verdict"] == "refuted"
    with open(tsv_path, encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n").split("\t")
    assert header == ["endpoints", "d_Q", "verdict"]


def test_records_frame_aplatit_les_listes(tmp_path):
    """Les listes deviennent du texte JSON"""
    _, _, payload = write_report(make_report("refuted"), str(tmp_path))
    frame = records_frame(payload)
    assert frame.loc[0, "endpoints"] == "[[[0, 0, 1, 0]], [[0, 0, 0, 1]]]"


def test_read_report_invalide(tmp_path):
    """Teste les rapports illisibles ou incomplets"""
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(LabConfigError):
        read_report(str(broken))
    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({"kind": "flat"}), encoding="utf-8")
    with pytest.raises(LabConfigError):
        read_report(str(partial))


# Tests pour la CLI
def test_farey_distance(capsys):
    """Teste la commande farey-distance"""
    assert main(["farey-distance", "1/0", "2/5"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "3"


def test_farey_distance_pente_invalide(capsys):
    """Une pente 0/0 est une erreur de configuration"""
    assert main(["farey-distance", "0/0", "1/1"]) == EXIT_CONFIG
    assert "erreur de configuration" in capsys.readouterr().err


def test_configuration_invalide(tmp_path):
    """Un nombre de piqûres hors plage donne le code 2"""
    assert main(["audit-convexity", "--n", "9", "--output", str(tmp_path)]) == EXIT_CONFIG
    assert main(["audit-convexity", "--n", "5", "--q", "1,3", "--output", str(tmp_path)]) == EXIT_CONFIG


def test_commande_report(tmp_path, capsys):
    """Teste la relecture d'un rapport et le code de sortie"""
    json_path, _, _ = write_report(make_report("refuted"), str(tmp_path))
    assert main(["report", "--input", json_path]) == EXIT_REFUTED
    out = capsys.readouterr().out
    assert "convexity: refuted" in out
    assert os.path.exists(os.path.splitext(json_path)[0] + ".tsv")


@pytest.mark.parametrize(
    "verdict, expected",
    [
        ("corroborated-complete", EXIT_OK),
        ("corroborated-capped", EXIT_OK),
        ("refuted", EXIT_REFUTED),
        ("incomplete", EXIT_INCOMPLETE),
    ],
)
@patch('pants_lab.__main__.convexity_audit')
@patch('pants_lab.__main__.CatalogCacheResource')
def test_audit_convexity(mock_catalog, mock_audit, verdict, expected, tmp_path, monkeypatch):
    """Teste les codes de sortie de audit-convexity"""
    monkeypatch.setenv("PANTS_LAB_CACHE_DIR", str(tmp_path / "cache"))
    mock_audit.return_value = make_report(verdict)

    assert main(["audit-convexity", "--n", "5", "--norm", "3", "--pairs", "7", "--output", str(tmp_path)]) == expected

    args = mock_audit.call_args[0]
    assert args[3:] == (7, 4, 0, 1000)
    assert os.path.exists(tmp_path / "convexity_n5_report.json")


@patch('pants_lab.__main__.flat_audit')
@patch('pants_lab.__main__.flat_catalog')
def test_audit_flat_q_par_defaut(mock_catalog, mock_audit, tmp_path):
    """Sans --q, la multicourbe par défaut atteint le rang"""
    mock_audit.return_value = AuditReport("flat", {"punctures": 6}, [{"verdict": "corroborated-complete"}])

    assert main(["audit-flat", "--n", "6", "--grid", "3", "--output", str(tmp_path)]) == EXIT_OK

    Q = mock_catalog.call_args[0][1]
    assert Q.intervals == ((1, 3),)
    assert mock_catalog.call_args[0][2:] == (2, 3)


@patch('pants_lab.__main__.lipschitz_audit')
@patch('pants_lab.__main__.CatalogCacheResource')
def test_erreur_du_laboratoire(mock_catalog, mock_audit, tmp_path, monkeypatch):
    """Une erreur de catalogue donne le code 3"""
    monkeypatch.setenv("PANTS_LAB_CACHE_DIR", str(tmp_path / "cache"))
    mock_audit.side_effect = CatalogError("P_Q ne rencontre pas le catalogue")

    assert main(["audit-lipschitz", "--output", str(tmp_path)]) == EXIT_INCOMPLETE


@patch('pants_lab.__main__.DuckDBResource')
@patch('pants_lab.__main__.convexity_audit')
@patch('pants_lab.__main__.CatalogCacheResource')
def test_option_store(mock_catalog, mock_audit, mock_store, tmp_path, monkeypatch):
    """--store enregistre le rapport dans DuckDB"""
    monkeypatch.setenv("PANTS_LAB_DUCKDB_PATH", str(tmp_path / "audits.duckdb"))
    mock_audit.return_value = make_report("corroborated-complete")

    assert main(["audit-convexity", "--store", "--output", str(tmp_path)]) == EXIT_OK

    mock_store.assert_called_once_with(database_path=str(tmp_path / "audits.duckdb"))
    run_id, payload = mock_store.return_value.store_report.call_args[0]
    assert run_id.startswith("cli-")
    assert payload["kind"] == "convexity"


def test_regenerate_rules(tmp_path, capsys):
    """La table régénérée sur des pentes bornées reprend les motifs livrés"""
    path = tmp_path / "rules.tsv"
    assert main(["regenerate-rules", "--bound", "3", "--output", str(path)]) == EXIT_OK
    assert str(path) in capsys.readouterr().out
    with open(path, encoding="utf-8") as handle:
        assert handle.readline().startswith("# table de disjonction")
    regenerated = load_rule_table(str(path))
    shipped = load_rule_table()
    assert regenerated
    for key, disjoint in regenerated.items():
        assert shipped[key] == disjoint


def test_regenerate_rules_borne_invalide(tmp_path):
    """Une borne nulle est une erreur de configuration"""
    assert main(["regenerate-rules", "--bound", "0", "--output", str(tmp_path / "rules.tsv")]) == EXIT_CONFIG
    assert not (tmp_path / "rules.tsv").exists()
