"""Paths to the data files shipped with the package."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path


def data_dir() -> Path:
    return Path(str(files("slgkit") / "data"))


def eval_demo_paths() -> tuple[Path, Path]:
    """The bundled four-row generated/gold evaluation fixture.

    One fully correct row, one with a wrong class label, one with a wrong
    extra entity, one free-text row that fails the format check; scoring it
    yields text 1/4, sc 2/4, ner 2/4, format 3/4.
    """
    d = data_dir()
    return d / "eval_demo.generated.txt", d / "eval_demo.gold.txt"
