"""File-per-learner record store.

One UTF-8 JSON document per learner under a data directory. Writes are
atomic (temp file + rename) and serialized per learner id, so concurrent
saves of distinct learners are safe and the last writer wins per learner.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import threading
from pathlib import Path

from .errors import LearnerNotFoundError, StorageError
from .learner import LearnerModel, model_from_document, model_to_document

_SAFE_ID = re.compile(r"^[a-z0-9_-]+$")


class LearnerStore:
    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot create data directory {self.directory}: {exc}") from exc
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, learner_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(learner_id, threading.Lock())

    def _path(self, learner_id: str) -> Path:
        if not _SAFE_ID.match(learner_id):
            raise StorageError(f"unsafe learner id: {learner_id!r}")
        return self.directory / f"{learner_id}.json"

    def save(self, model: LearnerModel) -> None:
        path = self._path(model.learner_id)
        payload = json.dumps(model_to_document(model), ensure_ascii=False, indent=2)
        with self._lock_for(model.learner_id):
            try:
                fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(payload)
                os.replace(tmp, path)
            except OSError as exc:
                raise StorageError(f"cannot save learner {model.learner_id}: {exc}") from exc

    def load(self, learner_id: str) -> LearnerModel:
        path = self._path(learner_id)
        with self._lock_for(learner_id):
            if not path.exists():
                raise LearnerNotFoundError(f"no record for learner '{learner_id}'")
            try:
                with open(path, encoding="utf-8") as fh:
                    doc = json.load(fh)
                return model_from_document(doc)
            except (OSError, ValueError, KeyError) as exc:
                raise StorageError(f"cannot load learner {learner_id}: {exc}") from exc

    def exists(self, learner_id: str) -> bool:
        return self._path(learner_id).exists()

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))

    def find_by_name(self, name: str) -> LearnerModel | None:
        """Linear scan; registration treats the display name as the identity."""
        for learner_id in self.list_ids():
            try:
                model = self.load(learner_id)
            except (LearnerNotFoundError, StorageError):
                continue
            if model.name == name:
                return model
        return None
