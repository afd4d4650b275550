"""Visited set of canonical forms that spills sorted runs to disk."""

from __future__ import annotations

import os
import tempfile
from typing import Iterable, Iterator

import numpy as np


def _tmpdir() -> str:
    return os.environ.get("CUBEFLIP_TMPDIR") or tempfile.gettempdir()


class VisitedStore:
    """Set of ``bytes`` keys.

    Keys live in memory until ``budget`` is exceeded; the in-memory part is
    then written as a sorted, memory-mapped run. Runs are merged once there
    are more than ``max_runs`` of them. On disk every key carries a trailing
    ``0x01`` byte so numpy's null padding cannot eat real trailing zeros.
    """

    def __init__(self, budget: int = 10_000_000, directory: str | None = None, max_runs: int = 8):
        self.budget = budget
        self.max_runs = max_runs
        self._mem: set[bytes] = set()
        self._runs: list[np.ndarray] = []
        self._paths: list[str] = []
        self._dir = tempfile.mkdtemp(prefix="cubeflip-visited-", dir=directory or _tmpdir())
        self._count = 0
        self._serial = 0

    def __len__(self) -> int:
        return self._count

    def __contains__(self, key: bytes) -> bool:
        if key in self._mem:
            return True
        if self._runs:
            skey = key + b"\x01"
            for run in self._runs:
                i = np.searchsorted(run, skey)
                if i < len(run) and run[i] == skey:
                    return True
        return False

    def add(self, key: bytes) -> bool:
        """Insert; returns False when already present."""
        if key in self:
            return False
        self._mem.add(key)
        self._count += 1
        if len(self._mem) > self.budget:
            self.flush()
        return True

    def update(self, keys: Iterable[bytes]) -> None:
        for k in keys:
            self.add(k)

    def flush(self) -> None:
        if not self._mem:
            return
        arr = np.array(sorted(k + b"\x01" for k in self._mem), dtype=bytes)
        self._write_run(arr)
        self._mem.clear()
        if len(self._runs) > self.max_runs:
            self._merge()

    def _write_run(self, arr: np.ndarray) -> None:
        path = os.path.join(self._dir, f"run{self._serial:05d}.npy")
        self._serial += 1
        np.save(path, arr)
        self._runs.append(np.load(path, mmap_mode="r"))
        self._paths.append(path)

    def _merge(self) -> None:
        merged = np.concatenate([np.asarray(r) for r in self._runs])
        merged.sort()
        old = self._paths
        self._runs, self._paths = [], []
        self._write_run(merged)
        for p in old:
            os.remove(p)

    @property
    def n_runs(self) -> int:
        return len(self._runs)

    def __iter__(self) -> Iterator[bytes]:
        """Keys in sorted order."""
        keys = list(self._mem)
        for r in self._runs:
            keys.extend(bytes(k)[:-1] for k in r)
        return iter(sorted(keys))

    def close(self) -> None:
        self._runs = []
        for p in self._paths:
            if os.path.exists(p):
                os.remove(p)
        self._paths = []
        try:
            os.rmdir(self._dir)
        except OSError:
            pass

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass
