"""
Configuration settings for the hexagonal-curves toolkit.
"""
from typing import Optional

import psutil
from pydantic_settings import BaseSettings


def _default_workers() -> int:
    return psutil.cpu_count(logical=False) or 1


class Settings(BaseSettings):
    """Application settings."""

    # Ground field
    prime: int = 12347

    # Randomness
    seed: int = 42
    retries: int = 20

    # Pipeline
    reduction_count: int = 2  # linear forms cut off before Koszul computations
    linear_strand_only: bool = True
    strand_length: int = 9  # positions i of β_{i,i+1} and β_{i,i+2} reported for syzygy schemes

    # Workers for the tables fan-out
    workers: int = _default_workers()

    # File Locking
    file_lock_timeout: float = 10.0

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None

    class Config:
        env_prefix = "HEXAGONAL_"
        env_file = ".env"
        env_file_encoding = "utf-8"
