import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, Sequence, TypeVar

from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

__version__ = "0.3.0"

T = TypeVar("T")
R = TypeVar("R")


class Settings(BaseModel):
    """Runtime settings resolved from the environment (and an optional .env file)"""
    threads: int = Field(default=0, ge=0, description="Worker cap, 0 = auto")
    log_level: str = "INFO"
    default_tol: float = Field(default=1e-9, gt=0)
    grid_resolution: int = Field(default=64, ge=2)
    arcs: int = Field(default=512, ge=8)

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()
        values = {
            "threads": os.getenv("BALAYAGE_THREADS"),
            "log_level": os.getenv("BALAYAGE_LOG_LEVEL"),
            "default_tol": os.getenv("BALAYAGE_DEFAULT_TOL"),
            "grid_resolution": os.getenv("BALAYAGE_GRID_RESOLUTION"),
            "arcs": os.getenv("BALAYAGE_ARCS"),
        }
        return cls.model_validate({k: v for k, v in values.items() if v not in (None, "")})

    @property
    def workers(self) -> int:
        if self.threads > 0:
            return self.threads
        return os.cpu_count() or 1


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get settings instance (read once per process)"""
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings


def parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: Optional[int] = None) -> list[R]:
    """Map fn over items on a thread pool; results keep the input order.

    Args:
        fn: Pure function applied to every item
        items: Work items (typically index chunks of a grid)
        workers: Worker cap; defaults to the configured BALAYAGE_THREADS

    Returns:
        List of results, positionally aligned with items
    """
    n_workers = workers if workers is not None else get_settings().workers
    if n_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(n_workers, len(items))) as pool:
        return list(pool.map(fn, items))


def chunked(indices: Iterable[int], size: int) -> list[list[int]]:
    """Split an index range into contiguous chunks of at most `size` elements"""
    out: list[list[int]] = []
    current: list[int] = []
    for i in indices:
        current.append(i)
        if len(current) == size:
            out.append(current)
            current = []
    if current:
        out.append(current)
    return out
