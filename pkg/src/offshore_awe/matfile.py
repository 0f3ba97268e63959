"""Plain-text hydrodynamic matrix file (grammar in docs/formats.md).

Example::

    # comment
    [M]
    7.6e5 0 0 0 0 0
    ...                       (6 rows of 6 numbers)
    [radiation]
    order = 6
    [A]                       (order rows x order)
    [B]                       (order rows x 6)
    [C]                       (6 rows x order)
    [D]                       (optional, 6 x 6)
    [exc_coeffs]
    f  Re1 Im1 ... Re6 Im6    (one row per frequency, Hz)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .hydro import HydroMatrices, RadiationStateSpace

HYDRO_SECTIONS = {"M": "mass", "Minf": "added_mass_inf", "Kh": "hydrostatic",
                  "Mm": "mooring_mass", "Bm": "mooring_damping",
                  "Km": "mooring_stiffness"}
SS_SECTIONS = ("A", "B", "C", "D")
KNOWN = set(HYDRO_SECTIONS) | set(SS_SECTIONS) | {"radiation", "exc_coeffs"}


@dataclass
class MatrixFile:
    hydro: HydroMatrices
    radiation: RadiationStateSpace
    exc_freqs: np.ndarray | None = None
    exc_coeffs: np.ndarray | None = None

    def excitation_on(self, freqs):
        """Excitation coefficients linearly interpolated onto ``freqs``."""
        if self.exc_coeffs is None:
            return None
        out = np.empty((len(freqs), 6), dtype=complex)
        for j in range(6):
            out[:, j] = (np.interp(freqs, self.exc_freqs, self.exc_coeffs[:, j].real)
                         + 1j * np.interp(freqs, self.exc_freqs, self.exc_coeffs[:, j].imag))
        return out


def _parse_sections(text, path):
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"{path}:{lineno}: malformed section header {raw!r}")
            name = line[1:-1].strip()
            if name not in KNOWN:
                raise ParseError(f"{path}:{lineno}: unknown section [{name}]")
            if name in sections:
                raise ParseError(f"{path}:{lineno}: duplicate section [{name}]")
            current = sections.setdefault(name, [])
            continue
        if current is None:
            raise ParseError(f"{path}:{lineno}: data outside any section")
        if "=" in line:
            key, _, val = line.partition("=")
            current.append((lineno, key.strip(), val.strip()))
            continue
        try:
            current.append((lineno, [float(v) for v in line.split()]))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    return sections


def _block(sections, name, shape, path):
    rows = [r for r in sections.get(name, []) if len(r) == 2]
    if not rows and shape[0] == 0:
        return np.zeros(shape)
    if len(rows) != shape[0]:
        raise ParseError(f"{path}: section [{name}] needs {shape[0]} rows, got {len(rows)}")
    for lineno, vals in rows:
        if len(vals) != shape[1]:
            raise ParseError(f"{path}:{lineno}: [{name}] row needs {shape[1]} values, "
                             f"got {len(vals)}")
    return np.array([vals for _, vals in rows], dtype=float).reshape(shape)


def read_matrix_file(path):
    with open(path) as fh:
        text = fh.read()
    return parse_matrix_text(text, str(path))


def parse_matrix_text(text, path="<string>"):
    sections = _parse_sections(text, path)
    missing = [s for s in HYDRO_SECTIONS if s not in sections]
    if missing:
        raise ParseError(f"{path}: missing section(s) {', '.join('[' + m + ']' for m in missing)}")
    hydro = HydroMatrices(**{field: _block(sections, name, (6, 6), path)
                             for name, field in HYDRO_SECTIONS.items()})

    order = 0
    for entry in sections.get("radiation", []):
        if len(entry) == 3 and entry[1] == "order":
            try:
                order = int(entry[2])
            except ValueError:
                raise ParseError(f"{path}:{entry[0]}: order must be an integer") from None
        else:
            raise ParseError(f"{path}:{entry[0]}: expected 'order = n' in [radiation]")
    if order < 0:
        raise ParseError(f"{path}: radiation order must be >= 0")
    D = _block(sections, "D", (6, 6), path) if "D" in sections else np.zeros((6, 6))
    if order:
        ss = RadiationStateSpace(_block(sections, "A", (order, order), path),
                                 _block(sections, "B", (order, 6), path),
                                 _block(sections, "C", (6, order), path), D)
    else:
        ss = RadiationStateSpace(np.zeros((0, 0)), np.zeros((0, 6)), np.zeros((6, 0)), D)

    exc_freqs = exc = None
    if "exc_coeffs" in sections:
        rows = [r for r in sections["exc_coeffs"] if len(r) == 2]
        for lineno, vals in rows:
            if len(vals) != 13:
                raise ParseError(f"{path}:{lineno}: [exc_coeffs] row needs 13 values")
        arr = np.array([v for _, v in rows], dtype=float)
        exc_freqs = arr[:, 0]
        if np.any(np.diff(exc_freqs) <= 0):
            raise ParseError(f"{path}: [exc_coeffs] frequencies must increase")
        exc = arr[:, 1::2] + 1j * arr[:, 2::2]
    return MatrixFile(hydro, ss, exc_freqs, exc)


def _write_block(lines, name, a):
    lines.append(f"[{name}]")
    for row in np.atleast_2d(a):
        lines.append(" ".join(f"{v:.17g}" for v in row))


def format_matrix_file(h, ss, exc_freqs=None, exc_coeffs=None, header=None):
    lines = []
    if header:
        lines += [f"# {ln}" for ln in header.splitlines()]
    lines.append("# SI units; DOF order surge sway heave roll pitch yaw")
    for name, field in HYDRO_SECTIONS.items():
        _write_block(lines, name, getattr(h, field))
    lines += ["[radiation]", f"order = {ss.order}"]
    if ss.order:
        _write_block(lines, "A", ss.A)
        _write_block(lines, "B", ss.B)
        _write_block(lines, "C", ss.C)
    _write_block(lines, "D", ss.D)
    if exc_coeffs is not None:
        lines.append("[exc_coeffs]")
        for f, row in zip(exc_freqs, exc_coeffs):
            vals = [f] + [x for c in row for x in (c.real, c.imag)]
            lines.append(" ".join(f"{v:.17g}" for v in vals))
    return "\n".join(lines) + "\n"


def write_matrix_file(path, h, ss, exc_freqs=None, exc_coeffs=None, header=None):
    with open(path, "w") as fh:
        fh.write(format_matrix_file(h, ss, exc_freqs, exc_coeffs, header))
