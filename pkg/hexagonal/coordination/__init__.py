"""
Coordination: report records, table fan-out and file locking.
"""
from .file_lock import FileLock, file_lock, write_locked
from .manager import Report, TableCoordinator, WorkerStatus, table_worker

__all__ = [
    'FileLock',
    'file_lock',
    'write_locked',
    'Report',
    'TableCoordinator',
    'WorkerStatus',
    'table_worker',
]
