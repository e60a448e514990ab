"""Location and well-known URIs of the corpus shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .uris import Uri

NAMESPACE = "http://ex.org/lib"

LF = Uri(NAMESPACE, "LF")
FOL = Uri(NAMESPACE, "FOL")
IMP = Uri(NAMESPACE, "IMP")
IMP_EXT = Uri(NAMESPACE, "IMPExt")
GROUP = Uri(NAMESPACE, "Group")
MONOID = Uri(NAMESPACE, "Monoid")


def archive_path() -> Path:
    """Directory of the shipped archive (manifest + sources).

    Builds write into the archive directory, so callers that must not touch
    the installation should copy this tree somewhere writable first.
    """
    return Path(resources.files("mmtk") / "bundled")
