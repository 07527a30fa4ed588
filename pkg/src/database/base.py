import json
import logging
from pathlib import Path
from typing import Generic, TypeVar

from pydantic import BaseModel, ValidationError

from src.errors import SchemaError

logger = logging.getLogger(__name__)

T = TypeVar('T', bound=BaseModel)


class JsonRepository(Generic[T]):
    """Base repository reading and writing one model per JSON file"""

    def __init__(self, model: type[T]):
        self.model = model

    def load(self, path: Path) -> T:
        """Read and validate a record

        Raises:
            SchemaError: the file is missing, not JSON, or does not match the model
        """
        path = Path(path)
        try:
            data = json.loads(path.read_text())
            return self.model.model_validate(data)
        except (OSError, json.JSONDecodeError, ValidationError) as e:
            logger.error(f"Error loading {self.model.__name__} from {path}: {str(e)}")
            raise SchemaError(f"cannot read {self.model.__name__} from {path}: {e}") from e

    def dumps(self, record: T) -> str:
        """Serialize with aliases; floats print in shortest round-trip form"""
        return record.model_dump_json(by_alias=True, indent=2)

    def save(self, record: T, path: Path) -> Path:
        """Write a record, creating parent directories"""
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.dumps(record) + "\n")
        except OSError as e:
            logger.error(f"Error writing {self.model.__name__} to {path}: {str(e)}")
            raise SchemaError(f"cannot write {path}: {e}") from e
        logger.info(f"Wrote {self.model.__name__} to {path}")
        return path
