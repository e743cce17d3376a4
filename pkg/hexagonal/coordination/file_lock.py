"""
File locking for curve and report files shared between worker processes.
"""
import fcntl
import os
import tempfile
import time
from contextlib import contextmanager


class FileLock:
    """
    OS-level exclusive lock on `<path>.lock` using fcntl.
    """

    def __init__(self, file_path: str, timeout: float = 10.0):
        """
        Initialize file lock.

        Args:
            file_path: Path of the file being guarded
            timeout: Maximum time to wait for lock acquisition (seconds)
        """
        self.file_path = file_path
        self.timeout = timeout
        self.lock_file_path = f"{file_path}.lock"
        self.lock_fd = None

    def acquire(self, blocking: bool = True) -> bool:
        """
        Acquire the lock.

        Args:
            blocking: If True, poll until the timeout; otherwise try once

        Returns:
            True if the lock is held on return
        """
        if self.lock_fd is not None:
            return True

        self.lock_fd = open(self.lock_file_path, 'w')
        start_time = time.monotonic()
        while True:
            try:
                fcntl.flock(self.lock_fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
                return True
            except BlockingIOError:
                if not blocking or time.monotonic() - start_time > self.timeout:
                    self.lock_fd.close()
                    self.lock_fd = None
                    return False
                time.sleep(0.1)

    def release(self):
        """Release the lock and remove the lock file."""
        if self.lock_fd is not None:
            try:
                fcntl.flock(self.lock_fd, fcntl.LOCK_UN)
                self.lock_fd.close()
            finally:
                self.lock_fd = None
                try:
                    os.remove(self.lock_file_path)
                except OSError:
                    pass

    def __enter__(self):
        if not self.acquire():
            raise TimeoutError(f"Could not acquire lock for {self.file_path}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.release()

    def __del__(self):
        self.release()


@contextmanager
def file_lock(file_path: str, timeout: float = 10.0):
    """
    Context manager for file locking.

    Usage:
        with file_lock('curve.json'):
            ...
    """
    lock = FileLock(file_path, timeout)
    try:
        if not lock.acquire():
            raise TimeoutError(f"Could not acquire lock for {file_path}")
        yield lock
    finally:
        lock.release()


def write_locked(file_path: str, text: str, timeout: float = 10.0):
    """Write text to a temporary file in the same directory and rename it into place under the lock."""
    directory = os.path.dirname(os.path.abspath(file_path))
    with file_lock(file_path, timeout):
        fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, 'w') as handle:
                handle.write(text)
            os.replace(tmp_path, file_path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
