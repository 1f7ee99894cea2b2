from __future__ import annotations

import zipfile
from pathlib import Path
from typing import Union

from ..errors import ArchiveError


def read_input_archive(path: Union[str, Path]) -> str:
    """Return DOML text from a plain file or from the single ``.doml`` entry of a ZIP."""
    path = Path(path)
    if not path.is_file():
        raise ArchiveError(f"input file not found: {path}")
    try:
        if zipfile.is_zipfile(path):
            with zipfile.ZipFile(path) as zf:
                entries = [n for n in zf.namelist() if n.lower().endswith(".doml") and not n.endswith("/")]
                if len(entries) != 1:
                    found = ", ".join(entries) or "none"
                    raise ArchiveError(f"{path}: expected exactly one .doml entry, found {len(entries)} ({found})")
                data = zf.read(entries[0])
        else:
            data = path.read_bytes()
        return data.decode("utf-8")
    except (OSError, zipfile.BadZipFile, UnicodeDecodeError) as exc:
        raise ArchiveError(f"cannot read {path}: {exc}") from exc
