"""
Point d'entrée en ligne de commande: python -m pants_lab <commande> [options].

Codes de sortie: 0 corroboré, 1 réfutation, 2 erreur de configuration, 3 incomplet.
"""

import argparse
import os
import sys
import uuid
from typing import List, Optional

import pandas as pd
from dagster import get_dagster_logger
from dotenv import load_dotenv

from pants_lab.resources.catalog_cache_resource import CatalogCacheResource
from pants_lab.resources.duckdb_resource import DuckDBResource
from pants_lab.resources.lab_settings import DEFAULT_Q_SETS, LabSettings
from pants_lab.topology.audits import INCOMPLETE, REFUTED, convexity_audit, flat_audit, flat_catalog, lipschitz_audit
from pants_lab.topology.errors import InvalidSlopeError, LabConfigError, LabError
from pants_lab.topology.farey import distance, parse_slope
from pants_lab.topology.window_models import RULE_TABLE_PATH, regenerate_rule_table, write_rule_table
from pants_lab.utils.reports import read_report, records_frame, write_report, write_tsv

logger = get_dagster_logger()

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_CONFIG = 2
EXIT_INCOMPLETE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pants_lab", description="Audits du graphe des pantalons")
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--n", type=int, default=5, help="nombre de piqûres (4 à 7)")
        sub.add_argument("--norm", type=int, default=2, help="borne de norme du catalogue")
        sub.add_argument("--q", action="append", default=None, help="courbe ronde de Q, ex. 1,2 (répétable)")
        sub.add_argument("--seed", type=int, default=0)
        sub.add_argument("--output", default=os.environ.get("PANTS_LAB_OUTPUT_DIR", "pants_lab/data/reports"))
        sub.add_argument("--cap", type=int, default=1000, help="nombre maximal de géodésiques énumérées")
        sub.add_argument("--store", action="store_true", help="enregistre le rapport dans DuckDB")

    common(commands.add_parser("build-catalog", help="construit le catalogue et le met en cache"))
    convexity = commands.add_parser("audit-convexity", help="audit de convexité de P_Q")
    common(convexity)
    convexity.add_argument("--max-dq", type=int, default=4)
    convexity.add_argument("--pairs", type=int, default=100)
    flat = commands.add_parser("audit-flat", help="audit des plats Z^r")
    common(flat)
    flat.add_argument("--grid", type=int, default=1)
    lipschitz = commands.add_parser("audit-lipschitz", help="audit lipschitzien après commutation")
    common(lipschitz)
    lipschitz.add_argument("--path-length", type=int, default=3)
    lipschitz.add_argument("--paths", type=int, default=50)

    farey = commands.add_parser("farey-distance", help="distance dans le graphe de Farey")
    farey.add_argument("a")
    farey.add_argument("b")
    report = commands.add_parser("report", help="affiche un rapport JSON et écrit son TSV")
    report.add_argument("--input", required=True)
    rules = commands.add_parser("regenerate-rules", help="recalcule la table de disjonction des arcs")
    rules.add_argument("--bound", type=int, default=6, help="borne de pente des arcs énumérés")
    rules.add_argument("--output", default=RULE_TABLE_PATH)
    return parser


def settings_from(args: argparse.Namespace) -> LabSettings:
    q_sets = args.q if args.q is not None else DEFAULT_Q_SETS.get(args.n, ["1,2"])
    return LabSettings(
        command=args.command,
        punctures=args.n,
        norm_bound=args.norm,
        q_sets=q_sets,
        pair_budget=getattr(args, "pairs", 100),
        length_budget=getattr(args, "max_dq", 4),
        grid_radius=getattr(args, "grid", 1),
        path_length=getattr(args, "path_length", 3),
        path_budget=getattr(args, "paths", 50),
        seed=args.seed,
        cap=args.cap,
        output_dir=args.output,
    ).validate()


def exit_status(verdict: str) -> int:
    if verdict == REFUTED:
        return EXIT_REFUTED
    if verdict == INCOMPLETE:
        return EXIT_INCOMPLETE
    return EXIT_OK


def run(args: argparse.Namespace) -> int:
    if args.command == "farey-distance":
        print(distance(parse_slope(args.a), parse_slope(args.b)))
        return EXIT_OK
    if args.command == "report":
        payload = read_report(args.input)
        print(records_frame(payload).to_string(index=False))
        tsv_path = write_tsv(payload, os.path.splitext(args.input)[0] + ".tsv")
        print(f"{payload['kind']}: {payload['summary']['verdict']} ({tsv_path})")
        return exit_status(payload["summary"]["verdict"])
    if args.command == "regenerate-rules":
        if args.bound < 1:
            raise LabConfigError(f"La borne de pente doit être au moins 1 (reçu {args.bound})")
        table = regenerate_rule_table(args.bound)
        path = write_rule_table(table, args.output)
        print(f"{len(table)} motifs ({path})")
        return EXIT_OK

    settings = settings_from(args)
    surface = settings.surface()
    cache = CatalogCacheResource(cache_dir=os.environ.get("PANTS_LAB_CACHE_DIR", "pants_lab/data/cache"))
    if args.command == "build-catalog":
        catalog = cache.get_or_build(surface, settings.norm_bound)
        print(f"{len(catalog)} courbes, {len(catalog.matrix)} intersections non nulles ({cache.path_for(surface.punctures, settings.norm_bound)})")
        return EXIT_OK

    Q = settings.multicurve()
    if args.command == "audit-convexity":
        catalog = cache.get_or_build(surface, settings.norm_bound)
        report = convexity_audit(surface, Q, catalog, settings.pair_budget, settings.length_budget, settings.seed, settings.cap)
    elif args.command == "audit-flat":
        catalog = flat_catalog(surface, Q, settings.norm_bound, settings.grid_radius)
        report = flat_audit(surface, Q, catalog, settings.grid_radius)
    else:
        catalog = cache.get_or_build(surface, settings.norm_bound)
        report = lipschitz_audit(surface, Q, catalog, settings.path_length, settings.path_budget, settings.seed)

    json_path, _, payload = write_report(report, settings.output_dir)
    if args.store:
        store = DuckDBResource(database_path=os.environ.get("PANTS_LAB_DUCKDB_PATH", "pants_lab/data/audits.duckdb"))
        store.store_report(f"cli-{uuid.uuid4().hex[:12]}", payload)
    summary = pd.Series(payload["summary"])
    print(summary.to_string())
    print(json_path)
    return exit_status(payload["summary"]["verdict"])


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (LabConfigError, InvalidSlopeError) as e:
        logger.error(f"Configuration invalide: {e}")
        print(f"erreur de configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except LabError as e:
        logger.error(f"Échec de {args.command}: {e}")
        print(f"erreur: {e}", file=sys.stderr)
        return EXIT_INCOMPLETE


if __name__ == "__main__":
    sys.exit(main())
