"""Bundles finished outputs into one report directory with a hash index."""
import hashlib
import logging
import shutil
from pathlib import Path
from typing import Dict, List, Sequence

from src.constants import (
    AUDIT_SUMMARY_TEMPLATE,
    CLUSTER_HIT_RATES_FILE,
    CLUSTER_POSITIONS_FILE,
    CODE_FREQUENCIES_FILE,
    CODES_BY_CLUSTER_FILE,
    COUNTERFACTUAL_FILE,
    DATASET_SUMMARY_FILE,
    HIT_CURVE_FILE,
    INGEST_SUMMARY_FILE,
    METRICS_FILE,
    MODEL_FILE,
    MONTHLY_HIT_RATES_FILE,
    ODDS_RATIOS_FILE,
    PREPOST_MONTHLY_FILE,
    PREPOST_SUMMARY_FILE,
    REPORT_DIR,
    REPORT_INDEX_FILE,
    SANITARIAN_CLUSTERS_FILE,
    SEASONAL_FILE,
)
from src.repositories.base_repository import PathLike
from src.repositories.model_repository import write_json

logger = logging.getLogger(__name__)

AUDIT_NAMES = ("hit-rates", "codes-by-cluster", "monthly", "prepost", "seasonal", "counterfactual")

REPORT_FILES = (
    INGEST_SUMMARY_FILE,
    DATASET_SUMMARY_FILE,
    MODEL_FILE,
    ODDS_RATIOS_FILE,
    SANITARIAN_CLUSTERS_FILE,
    METRICS_FILE,
    HIT_CURVE_FILE,
    CLUSTER_HIT_RATES_FILE,
    CODE_FREQUENCIES_FILE,
    CODES_BY_CLUSTER_FILE,
    MONTHLY_HIT_RATES_FILE,
    PREPOST_MONTHLY_FILE,
    PREPOST_SUMMARY_FILE,
    SEASONAL_FILE,
    COUNTERFACTUAL_FILE,
    CLUSTER_POSITIONS_FILE,
) + tuple(AUDIT_SUMMARY_TEMPLATE.format(name=name.replace("-", "_")) for name in AUDIT_NAMES)


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_report(out_dir: PathLike, names: Sequence[str] = REPORT_FILES) -> Dict[str, List[Dict[str, str]]]:
    """
    Copy the named outputs of ``out_dir`` into ``out_dir/report`` and index them.

    Absent outputs are listed under ``missing``; the report never fails for them.

    Returns:
        Dict: The index written as report/index.json
    """
    out_dir = Path(out_dir)
    report_dir = out_dir / REPORT_DIR
    report_dir.mkdir(parents=True, exist_ok=True)

    files = []
    missing = []
    for name in sorted(set(names)):
        source = out_dir / name
        if not source.is_file():
            missing.append(name)
            continue
        shutil.copyfile(source, report_dir / name)
        files.append({"name": name, "sha256": sha256_of(report_dir / name)})

    index = {"files": files, "missing": missing}
    write_json(report_dir / REPORT_INDEX_FILE, index)
    logger.info(f"Report bundled {len(files)} files into {report_dir} ({len(missing)} missing)")
    return index
