"""Minimal TSPLIB reader: headers plus vertex coordinates.

Only coordinates are consumed downstream (Dubins costs need poses, not the
library's distance functions). NODE_COORD_SECTION wins when present,
otherwise DISPLAY_DATA_SECTION; an EDGE_WEIGHT_SECTION is tolerated and
skipped.
"""

from __future__ import annotations


class TsplibError(ValueError):
    """Parse failure; message carries the 1-based line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_SECTIONS = {
    "NODE_COORD_SECTION",
    "DISPLAY_DATA_SECTION",
    "EDGE_WEIGHT_SECTION",
    "DEMAND_SECTION",
    "DEPOT_SECTION",
    "FIXED_EDGES_SECTION",
    "TOUR_SECTION",
    "EOF",
}


def parse_tsplib(text: str):
    """Return [(id, x, y), ...] in file order.

    Raises TsplibError on a malformed header, a missing coordinate section,
    or a coordinate count that disagrees with DIMENSION.
    """
    headers = {}
    coords = {"NODE_COORD_SECTION": [], "DISPLAY_DATA_SECTION": []}
    section = None
    lines = text.splitlines()
    for idx, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        token = line.rstrip(":").strip()
        if token in _SECTIONS:
            if token == "EOF":
                break
            section = token
            continue
        if section is None:
            if ":" not in line:
                raise TsplibError(f"malformed header line {line!r}", idx)
            key, _, value = line.partition(":")
            headers[key.strip().upper()] = value.strip()
        elif section in coords:
            parts = line.split()
            if len(parts) < 3:
                raise TsplibError(f"malformed coordinate line {line!r}", idx)
            try:
                vid = int(parts[0])
                x, y = float(parts[1]), float(parts[2])
            except ValueError:
                raise TsplibError(f"malformed coordinate line {line!r}", idx) from None
            coords[section].append((vid, x, y))
        # other sections (edge weights etc.) are skipped

    if "DIMENSION" not in headers:
        raise TsplibError("missing DIMENSION header", len(lines))
    try:
        dimension = int(headers["DIMENSION"])
    except ValueError:
        raise TsplibError("DIMENSION is not an integer", len(lines)) from None

    chosen = coords["NODE_COORD_SECTION"] or coords["DISPLAY_DATA_SECTION"]
    if not chosen:
        raise TsplibError(
            "no NODE_COORD_SECTION or DISPLAY_DATA_SECTION found", len(lines)
        )
    if len(chosen) != dimension:
        raise TsplibError(
            f"DIMENSION is {dimension} but {len(chosen)} coordinates were read",
            len(lines),
        )
    return chosen
