"""Bundled benchmark networks and loaders for SNAP-format data.

Only Zachary's karate club ships with the package. Other small networks
(dolphins, football) are looked up as ``<name>.edges`` / ``<name>.cmty`` in
this directory or in ``$COMMEMBED_DATA``; large SNAP networks go through
:func:`load_snap`.
"""
from __future__ import annotations

import os
from importlib.resources import files
from pathlib import Path

from ..graph import Graph, GroundTruthCover, parse_community_file, parse_edge_list

BUNDLED = ("karate", "dolphin", "football")


def _locate(name: str, suffix: str) -> Path | None:
    candidates = [Path(str(files(__name__).joinpath(f"{name}.{suffix}")))]
    extra = os.environ.get("COMMEMBED_DATA")
    if extra:
        candidates.append(Path(extra) / f"{name}.{suffix}")
    for path in candidates:
        if path.is_file():
            return path
    return None


def available() -> list[str]:
    return [name for name in BUNDLED if _locate(name, "edges") is not None]


def load(name: str) -> tuple[Graph, GroundTruthCover]:
    """Graph and ground-truth cover of a named small network."""
    if name not in BUNDLED:
        raise ValueError(f"unknown dataset {name!r}; known: {', '.join(BUNDLED)}")
    edges, cmty = _locate(name, "edges"), _locate(name, "cmty")
    if edges is None or cmty is None:
        raise FileNotFoundError(
            f"dataset {name!r} is not bundled; put {name}.edges and {name}.cmty in $COMMEMBED_DATA")
    return load_files(edges, cmty)


def load_files(edges: str | os.PathLike, communities: str | os.PathLike | None = None
               ) -> tuple[Graph, GroundTruthCover | None]:
    graph = parse_edge_list(Path(edges).read_text(encoding="utf-8"))
    cover = None
    if communities is not None:
        cover = parse_community_file(Path(communities).read_text(encoding="utf-8"), graph)
    return graph, cover


def load_snap(edges: str | os.PathLike, communities: str | os.PathLike) -> tuple[Graph, GroundTruthCover]:
    """SNAP ``*.ungraph.txt`` + ``*.cmty.txt`` pair (e.g. Youtube, DBLP).

    Communities may overlap and may leave nodes uncovered.
    """
    return load_files(edges, communities)


def load_karate() -> tuple[Graph, GroundTruthCover]:
    return load("karate")
