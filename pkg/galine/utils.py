"""
Logging setup and report I/O
"""
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"
LOG_ENV = "GALINE_LOG"


def setup_logging(level: str = "INFO", log_file: Optional[str] = None):
    """
    Setup logging configuration

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR); GALINE_LOG overrides it
        log_file: Optional log file path
    """
    level = os.getenv(LOG_ENV, level)
    numeric_level = getattr(logging, level.upper(), logging.INFO)

    handlers = [logging.StreamHandler()]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))

    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )


def format_float(value: float) -> str:
    return FLOAT_FORMAT % value


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(format_float(float(value)))
    return value


def load_json(file_path: str) -> Dict[str, Any]:
    """Load JSON file"""
    with open(file_path, "r", encoding="utf-8") as f:
        return json.load(f)


def save_json(data: Dict[str, Any], file_path: str):
    """Save JSON file with sorted keys and 17-significant-digit floats"""
    Path(file_path).parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(_jsonable(data), f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


def save_csv(frame: pd.DataFrame, file_path: str):
    """Save a series as UTF-8 CSV with '.' decimals"""
    Path(file_path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(file_path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8")
