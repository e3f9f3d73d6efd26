"""
Artifact writer
Writes result tables and run manifests into the output directory
"""
import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src import __version__
from src.utils.exceptions import GenerationError
from src.utils.logger import Logger, NullLogger


FORMATS = ("csv", "json")


def format_value(value: Any) -> str:
    """CSV cell text: floats with 15 significant digits, None as empty"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".15g")
    if isinstance(value, (list, tuple)):
        return " ".join(format_value(v) for v in value)
    return str(value)


@dataclass
class RunManifest:
    """Parameters and outputs of one command run"""
    command: str
    parameters: Dict[str, Any]      = field(default_factory=dict)
    seed: Optional[int]             = None
    version: str                    = __version__
    outputs: List[str]              = field(default_factory=list)
    duration_s: float               = 0.0
    started: float                  = field(default_factory=time.perf_counter, repr=False)

    def finish(self) -> "RunManifest":
        self.duration_s = time.perf_counter() - self.started
        return self

    def to_dict(self) -> Dict:
        return {
            'command': self.command,
            'parameters': self.parameters,
            'seed': self.seed,
            'version': self.version,
            'outputs': list(self.outputs),
            'duration_s': self.duration_s,
        }


class ArtifactWriter:
    """Writes tables as CSV or JSON plus one manifest per run"""

    def __init__(
        self,
        output_dir: Path,
        fmt: str                    = "csv",
        logger: Optional[Logger]    = None
    ):
        """
        Args:
            output_dir: Destination directory
            fmt: Table format, csv or json
            logger: Logger for messages
        """
        if fmt not in FORMATS:
            raise GenerationError(f"Unknown output format '{fmt}', expected one of {FORMATS}")

        self.output_dir     = Path(output_dir)
        self.fmt            = fmt
        self.logger         = logger or NullLogger()

        self.stats = {
            'files_written': 0,
            'rows_written': 0,
            'errors': []
        }

    def _prepare(self) -> None:
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except Exception as e:
            raise GenerationError(f"Unable to create output directory: {e}")

    def _write_text(self, name: str, text: str) -> Optional[Path]:
        self._prepare()
        path = self.output_dir / name
        try:
            with open(path, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
        except Exception as e:
            error_msg = f"Failed to write {name}: {e}"
            self.stats['errors'].append(error_msg)
            self.logger.error(f"  {error_msg}")
            return None

        self.stats['files_written'] += 1
        self.logger.debug(f"  [FILE] {path}")
        return path

    def render_table(self, rows: Sequence[Dict], columns: Sequence[str]) -> str:
        """Table text in the writer's format"""
        if self.fmt == "json":
            records = [{c: row.get(c) for c in columns} for row in rows]
            return json.dumps(records, indent=2, sort_keys=True) + "\n"

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])
        return buffer.getvalue()

    def write_table(
        self,
        stem: str,
        rows: Sequence[Dict],
        columns: Sequence[str],
        manifest: Optional[RunManifest] = None
    ) -> Optional[Path]:
        """
        Write one result table

        Args:
            stem: File name without extension
            rows: Row dictionaries
            columns: Column order; missing keys become empty cells
            manifest: Manifest that records the file

        Returns:
            Path of the written file, None on failure
        """
        path = self._write_text(f"{stem}.{self.fmt}", self.render_table(rows, columns))
        if path is not None:
            self.stats['rows_written'] += len(rows)
            if manifest is not None:
                manifest.outputs.append(path.name)
        return path

    def write_json(
        self,
        stem: str,
        document: Any,
        manifest: Optional[RunManifest] = None
    ) -> Optional[Path]:
        text = json.dumps(document, indent=2, sort_keys=True, default=str) + "\n"
        path = self._write_text(f"{stem}.json", text)
        if path is not None and manifest is not None:
            manifest.outputs.append(path.name)
        return path

    def write_manifest(self, manifest: RunManifest) -> Optional[Path]:
        """Finish timing and write `<command>.manifest.json`"""
        manifest.finish()
        return self.write_json(f"{manifest.command}.manifest", manifest.to_dict())
