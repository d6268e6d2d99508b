"""
CSV and JSON emission for sweeps, GA runs, fits and models.

Every table is written with a `<file>.meta.json` sidecar carrying the command,
seed, full configuration and library versions, so the CSV body itself stays
byte-identical between runs with the same inputs.
"""
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx
import numpy
import orjson
import pandas as pd
import scipy
from pydantic import BaseModel

from .errors import ConfigurationError, PersistenceError
from .genetic_topology_optimizer import GaRunRecord
from .ground_state_metrology import ScalingFit

logger = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
CSV_FLOAT_FORMAT = "%.12g"
AGGREGATE_COLUMNS = ["N", "first_hit_generation", "best_dn", "best_qfi"]
AGGREGATE_FILENAME = "ga_summary.csv"

PathLike = Union[str, Path]


def _plain(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Cannot serialize {type(obj).__name__}")


def json_bytes(obj: Any) -> bytes:
    return orjson.dumps(obj, default=_plain, option=JSON_OPTIONS)


def write_json(obj: Any, path: PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(json_bytes(obj))
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise PersistenceError(f"Failed to write JSON ({e})", path) from e
    return path


def read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        return orjson.loads(path.read_bytes())
    except OSError as e:
        raise PersistenceError(f"Failed to read JSON ({e})", path) from e
    except orjson.JSONDecodeError as e:
        raise PersistenceError(f"Malformed JSON ({e})", path) from e


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise PersistenceError(f"Failed to write CSV ({e})", path) from e
    return path


def library_versions() -> Dict[str, str]:
    from . import __version__

    return {
        "sensornet": __version__,
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "networkx": networkx.__version__,
        "pandas": pd.__version__,
    }


def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_provenance(
    path: PathLike,
    command: str,
    config: Any,
    seed: Optional[int] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """Sidecar describing how `path` was produced"""
    meta = {
        "command": command,
        "seed": seed,
        "config": config,
        "versions": library_versions(),
        "created": datetime.now(timezone.utc).isoformat(),
        "file": Path(path).name,
    }
    if extra:
        meta["summary"] = extra
    return write_json(meta, sidecar_path(path))


def write_table(
    frame: pd.DataFrame,
    path: PathLike,
    command: str,
    config: Any,
    seed: Optional[int] = None,
    fmt: str = "csv",
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write a result table as CSV or JSON records, plus its provenance sidecar"""
    path = Path(path)
    if fmt == "csv":
        write_csv(frame, path)
    elif fmt == "json":
        write_json({"seed": seed, "config": config, "rows": frame.to_dict(orient="records")}, path)
    else:
        raise ConfigurationError(f"Unknown output format '{fmt}'")
    write_provenance(path, command, config, seed, extra)
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_series(path: PathLike) -> Tuple[List[int], List[float]]:
    """(N, value) columns of a series CSV"""
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError as e:
        raise PersistenceError("Series file not found", path) from e
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise PersistenceError(f"Failed to read series ({e})", path) from e
    missing = {"N", "value"} - set(frame.columns)
    if missing:
        raise ConfigurationError(f"Series file {path} lacks columns {sorted(missing)}")
    return [int(N) for N in frame["N"]], [float(v) for v in frame["value"]]


def write_series(Ns: Sequence[int], values: Sequence[float], path: PathLike) -> Path:
    return write_csv(pd.DataFrame({"N": list(Ns), "value": list(values)}), path)


def write_fit(fit: ScalingFit, path: PathLike) -> Path:
    return write_json(fit, path)


def run_record_path(directory: Path, record: GaRunRecord) -> Path:
    return directory / f"ga_run_n{record.n}_seed{record.seed}.json"


def aggregate_frame(records: Iterable[GaRunRecord]) -> pd.DataFrame:
    rows = [
        {
            "N": record.n,
            "first_hit_generation": record.first_hit_generation,
            "best_dn": record.best_dn,
            "best_qfi": record.best_qfi,
        }
        for record in records
    ]
    return pd.DataFrame(rows, columns=AGGREGATE_COLUMNS)


def export_records(
    records: Sequence[GaRunRecord],
    path: PathLike,
    command: str = "ga",
    config: Any = None,
) -> List[Path]:
    """Per-run JSON files and an aggregate CSV inside the directory `path`, each with a sidecar.

    Run sidecars carry the run's own GA configuration unless `config` is given.
    """
    directory = Path(path)
    written = []
    for record in records:
        run_path = write_json(record, run_record_path(directory, record))
        write_provenance(run_path, command, config if config is not None else record.config, record.seed)
        written.append(run_path)

    seeds = {record.seed for record in records}
    if config is None:
        configs = [record.config for record in records]
        config = configs[0] if len(configs) == 1 else configs
    aggregate = write_table(
        aggregate_frame(records),
        directory / AGGREGATE_FILENAME,
        command,
        config,
        seeds.pop() if len(seeds) == 1 else None,
    )
    written.append(aggregate)
    logger.info(f"Exported {len(records)} GA run records to {directory}")
    return written


def load_record(path: PathLike) -> GaRunRecord:
    try:
        return GaRunRecord.model_validate(read_json(path))
    except ValueError as e:
        raise PersistenceError(f"Invalid GA run record ({e})", path) from e
