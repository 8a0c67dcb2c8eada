"""Reading and writing measure-description files.

A file is a JSON object with a ``components`` array and an optional declared
total ``mass``. Each component carries a ``weight`` (default 1) and a
``kind``:

``atomic``   ``"atoms": [[turns, mass], ...]``
``density``  ``"breakpoints": [t_0, ..., t_r]`` and ``"pieces": [{"family", "params"}, ...]``,
             or a single piece given by ``"family"``, ``"params"`` and
             optional ``"start"``/``"stop"``
``riesz``    ``"alphas": [...]``, ``"ells": [...]``, optional ``"shift"``

Angles are fractions of a full turn. Numbers may be JSON numbers or strings;
strings such as ``"1/3"`` or ``"0.125"`` are read exactly.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import mpmath

from .measures import (
    CLOSED_FAMILIES,
    AtomicComponent,
    DensityPiece,
    LacunarityError,
    Measure,
    PiecewiseDensityComponent,
    RieszProductComponent,
)
from .precision import mp_str, to_fraction, to_mpf

FILE_FAMILIES = CLOSED_FAMILIES + ("exp_neg_inv_abs",)
MASS_RTOL = 1e-12


class MeasureFileError(ValueError):
    """Schema violation; ``path`` names the offending field, ``line`` the source line when known."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        where = path or "<document>"
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


def _number(value, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise MeasureFileError(f"expected a number or numeric string, got {type(value).__name__}", path)
    try:
        return to_fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise MeasureFileError(f"cannot read {value!r} as a number ({exc})", path) from None


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise MeasureFileError(f"missing field {key!r}", f"{path}.{key}" if path else key)
    return obj[key]


def _list(value, path: str, min_len: int = 1) -> list:
    if not isinstance(value, list):
        raise MeasureFileError(f"expected an array, got {type(value).__name__}", path)
    if len(value) < min_len:
        raise MeasureFileError(f"expected at least {min_len} entries", path)
    return value


def _atomic(entry: dict, path: str) -> AtomicComponent:
    atoms = _list(_require(entry, "atoms", path), f"{path}.atoms")
    turns, masses = [], []
    for i, pair in enumerate(atoms):
        p = f"{path}.atoms[{i}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise MeasureFileError("an atom is a pair [turns, mass]", p)
        turns.append(_number(pair[0], f"{p}[0]"))
        m = _number(pair[1], f"{p}[1]")
        if m <= 0:
            raise MeasureFileError("atom mass must be positive", f"{p}[1]")
        masses.append(m)
    try:
        return AtomicComponent(tuple(turns), tuple(masses))
    except ValueError as exc:
        raise MeasureFileError(str(exc), f"{path}.atoms") from None


def _piece(obj: dict, path: str) -> DensityPiece:
    family = _require(obj, "family", path)
    if family not in FILE_FAMILIES:
        raise MeasureFileError(f"unknown density family {family!r}; expected one of {list(FILE_FAMILIES)}", f"{path}.family")
    params = _list(_require(obj, "params", path), f"{path}.params", 0)
    if family == "trig":
        parsed = []
        for i, kc in enumerate(params):
            q = f"{path}.params[{i}]"
            if not isinstance(kc, list) or len(kc) not in (2, 3):
                raise MeasureFileError("trig parameters are [k, re] or [k, re, im]", q)
            k = _number(kc[0], f"{q}[0]")
            if k.denominator != 1:
                raise MeasureFileError("frequency must be an integer", f"{q}[0]")
            re = float(_number(kc[1], f"{q}[1]"))
            im = float(_number(kc[2], f"{q}[2]")) if len(kc) == 3 else 0.0
            parsed.append((int(k), complex(re, im)))
        params = parsed
    else:
        params = [_number(v, f"{path}.params[{i}]") for i, v in enumerate(params)]
        if family == "exp_neg_inv_abs":
            params = [float(params[0]), params[1]]
    try:
        return DensityPiece(family, tuple(params))
    except (ValueError, IndexError, TypeError) as exc:
        raise MeasureFileError(str(exc) or "bad parameters", f"{path}.params") from None


def _density(entry: dict, path: str) -> PiecewiseDensityComponent:
    if "pieces" in entry:
        bps = _list(_require(entry, "breakpoints", path), f"{path}.breakpoints", 2)
        bps = [_number(b, f"{path}.breakpoints[{i}]") for i, b in enumerate(bps)]
        pieces = _list(entry["pieces"], f"{path}.pieces")
        pieces = [_piece(p, f"{path}.pieces[{i}]") for i, p in enumerate(pieces)]
    else:
        start = _number(entry.get("start", 0), f"{path}.start")
        stop = _number(entry.get("stop", 1), f"{path}.stop")
        bps, pieces = [start, stop], [_piece(entry, path)]
    try:
        return PiecewiseDensityComponent(tuple(bps), tuple(pieces))
    except ValueError as exc:
        raise MeasureFileError(str(exc), f"{path}.breakpoints") from None


def _riesz(entry: dict, path: str) -> RieszProductComponent:
    alphas = _list(_require(entry, "alphas", path), f"{path}.alphas")
    ells = _list(_require(entry, "ells", path), f"{path}.ells")
    alphas = [_number(a, f"{path}.alphas[{i}]") for i, a in enumerate(alphas)]
    parsed = []
    for i, l in enumerate(ells):
        v = _number(l, f"{path}.ells[{i}]")
        if v.denominator != 1:
            raise MeasureFileError("frequencies must be integers", f"{path}.ells[{i}]")
        parsed.append(int(v))
    shift = _number(entry.get("shift", 0), f"{path}.shift")
    try:
        return RieszProductComponent(tuple(alphas), tuple(parsed), shift)
    except LacunarityError as exc:
        raise MeasureFileError(str(exc), f"{path}.ells") from None
    except ValueError as exc:
        raise MeasureFileError(str(exc), path) from None


_KINDS = {"atomic": _atomic, "density": _density, "riesz": _riesz}


def measure_from_dict(doc) -> Measure:
    """Build a :class:`Measure` from a parsed measure description."""
    if not isinstance(doc, dict):
        raise MeasureFileError("top level must be an object")
    comps = _list(_require(doc, "components", ""), "components")
    parts = []
    for i, entry in enumerate(comps):
        path = f"components[{i}]"
        if not isinstance(entry, dict):
            raise MeasureFileError("component must be an object", path)
        kind = _require(entry, "kind", path)
        if kind not in _KINDS:
            raise MeasureFileError(f"unknown kind {kind!r}; expected one of {sorted(_KINDS)}", f"{path}.kind")
        weight = _number(entry.get("weight", 1), f"{path}.weight")
        if weight < 0:
            raise MeasureFileError("weight must be nonnegative", f"{path}.weight")
        parts.append((weight, _KINDS[kind](entry, path)))
    try:
        measure = Measure(tuple(parts))
    except ValueError as exc:
        raise MeasureFileError(str(exc), "components") from None
    if "mass" in doc:
        declared = _number(doc["mass"], "mass")
        with mpmath.workprec(128):
            actual = to_mpf(measure.total_mass)
            if abs(actual - to_mpf(declared)) > MASS_RTOL * max(abs(to_mpf(declared)), 1):
                raise MeasureFileError(
                    f"component masses sum to {mpmath.nstr(actual, 17)}, declared {mpmath.nstr(to_mpf(declared), 17)}", "mass")
    return measure


def _locate(text: str, path: str) -> int | None:
    """Best-effort line of the first component named in ``path``."""
    if not path.startswith("components["):
        return None
    idx = int(path[len("components["):path.index("]")])
    depth, count, line = 0, -1, 1
    in_components = False
    i = text.find('"components"')
    if i < 0:
        return None
    line += text.count("\n", 0, i)
    for ch in text[i:]:
        if ch == "\n":
            line += 1
        elif ch == "[" and not in_components:
            in_components = True
            depth = 1
            continue
        if not in_components:
            continue
        if ch in "[{":
            if depth == 1 and ch == "{":
                count += 1
                if count == idx:
                    return line
            depth += 1
        elif ch in "]}":
            depth -= 1
            if depth == 0:
                return None
    return None


def parse_measure_file(path) -> Measure:
    """Read a measure-description JSON file.

    Raises
    ------
    MeasureFileError
        With the field path (for example ``components[1].ells``) and, when it
        can be located, the source line.
    """
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureFileError(exc.msg, f"column {exc.colno}", exc.lineno) from None
    try:
        return measure_from_dict(doc)
    except MeasureFileError as exc:
        if exc.line is None:
            line = _locate(text, exc.path)
            if line is not None:
                raise MeasureFileError(str(exc).split(": ", 1)[1], exc.path, line) from None
        raise


def _num_out(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, mpmath.mpf):
        return mp_str(x)
    return repr(x)


def _piece_out(piece: DensityPiece) -> dict:
    if piece.family == "callable":
        raise ValueError("callable density pieces cannot be written to a measure file")
    if piece.family == "trig":
        params = [[k, _num_out(complex(c).real), _num_out(complex(c).imag)] for k, c in piece.params]
    else:
        params = [_num_out(p) for p in piece.params]
    return {"family": piece.family, "params": params}


def measure_to_dict(measure: Measure) -> dict:
    """Measure description with exact rationals as ``"p/q"`` strings."""
    with mpmath.workprec(256):
        comps = [_component_out(w, c) for w, c in measure.components]
        return {"mass": _num_out(measure.total_mass), "components": comps}


def _component_out(w, c) -> dict:
    entry: dict = {"weight": _num_out(w)}
    if isinstance(c, AtomicComponent):
        entry["kind"] = "atomic"
        entry["atoms"] = [[_num_out(t), _num_out(m)] for t, m in zip(c.turns, c.masses)]
    elif isinstance(c, PiecewiseDensityComponent):
        entry["kind"] = "density"
        entry["breakpoints"] = [_num_out(b) for b in c.breakpoints]
        entry["pieces"] = [_piece_out(p) for p in c.pieces]
    else:
        entry["kind"] = "riesz"
        entry["alphas"] = [_num_out(a) for a in c.alphas]
        entry["ells"] = list(c.ells)
        if c.shift:
            entry["shift"] = _num_out(c.shift)
    return entry


def write_measure_file(measure: Measure, path) -> None:
    Path(path).write_text(json.dumps(measure_to_dict(measure), indent=2) + "\n")
