import csv
import io
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, TextIO

from pydantic import BaseModel

from src.errors import SchemaError
from src.schema.asymptotics import DecayReport
from src.schema.kernel import GridRow

logger = logging.getLogger(__name__)


class ExportFormat(str, Enum):
    """Artifacts written by the acceptance battery"""
    SUMMARY = "summary.json"
    DECAY = "decay.csv"


def format_float(value: float) -> str:
    """Shortest round-trip text; −∞ as "-inf", undefined as "nan" """
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "-inf" if value < 0 else "inf"
    return repr(float(value))


class StorageClient:
    """Writes reports and CSV exports to the local filesystem or a text stream"""

    def write_text(self, text: str, path: Optional[Path], stream: Optional[TextIO] = None) -> Optional[Path]:
        """Write to path when given, else to the stream"""
        if path is None:
            if stream is not None:
                stream.write(text)
            return None
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as e:
            logger.error(f"Error writing {path}: {str(e)}", exc_info=True)
            raise SchemaError(f"cannot write {path}: {e}") from e
        return path

    def write_report(self, report: BaseModel, path: Optional[Path], stream: Optional[TextIO] = None) -> Optional[Path]:
        return self.write_text(report.model_dump_json(by_alias=True, indent=2) + "\n", path, stream)

    def grid_csv(self, rows: Iterable[GridRow]) -> str:
        """CSV with columns re, im, pt_plus, pt_minus, pt_total"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["re", "im", "pt_plus", "pt_minus", "pt_total"])
        for row in rows:
            writer.writerow([format_float(v) for v in (row.re, row.im, row.pt_plus, row.pt_minus, row.pt_total)])
        return buffer.getvalue()

    def decay_csv(self, report: DecayReport) -> str:
        """Per-ray samples (ln r, ln |pt_{ω−δ}|) for external plotting"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["ray", "angle", "ln_r", "ln_abs_diff"])
        for index, ray in enumerate(report.rays):
            for ln_r, ln_v in zip(ray.log_radii, ray.log_values):
                writer.writerow([index, format_float(ray.angle), format_float(ln_r), format_float(ln_v)])
        return buffer.getvalue()

    def read_grid_csv(self, text: str) -> list[GridRow]:
        reader = csv.DictReader(io.StringIO(text))
        return [GridRow(**{k: float(v) for k, v in row.items()}) for row in reader]
