"""File emission: CSV (lossless doubles), run metadata, scan tables.

CSV files are RFC-4180-style with a mandatory header row, '.' decimal
separator, Unix newlines and %.17g formatting so doubles round-trip.
"""

import csv
import json

import numpy as np

__all__ = [
    "ParseError",
    "fmt",
    "write_points_csv",
    "read_points_csv",
    "write_segments_csv",
    "write_scan_csv",
    "write_meta",
]


class ParseError(ValueError):
    """A CSV input file is malformed."""


def fmt(x: float) -> str:
    return f"{x:.17g}"


def write_points_csv(path, s, theta) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("s,theta\n")
        for a, b in zip(s, theta):
            fh.write(f"{fmt(a)},{fmt(b)}\n")


def read_points_csv(path):
    """Read an (s, theta) CSV written by write_points_csv."""
    s, theta = [], []
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["s", "theta"]:
            raise ParseError(f"{path}: expected header 's,theta', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                s.append(float(row[0]))
                theta.append(float(row[1]))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return np.asarray(s), np.asarray(theta)


def write_segments_csv(path, segments) -> None:
    """Unstable-manifold segments: one (theta, s_start, s_end) row each."""
    with open(path, "w", newline="\n") as fh:
        fh.write("theta,s_start,s_end\n")
        for theta, s_lo, s_hi in segments:
            fh.write(f"{fmt(theta)},{fmt(s_lo)},{fmt(s_hi)}\n")


def write_scan_csv(path, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("lambda,components,homoclinic,bands,alpha,gap_covered\n")
        for r in rows:
            fh.write(
                f"{fmt(r.lam)},{r.components},{'true' if r.homoclinic else 'false'},"
                f"{r.bands},{fmt(r.alpha)},{'true' if r.gap_covered else 'false'}\n"
            )


def write_meta(path, mapping: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(mapping, fh, indent=2, sort_keys=True)
        fh.write("\n")
