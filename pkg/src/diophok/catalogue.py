"""Field and curve catalogues (JSON).

The catalogue directory defaults to the packaged data and can be
overridden with the ``DIOPHOK_CATALOGUE`` environment variable or an
explicit path. Loaded objects are memoised per path.
"""

import json
import os
import threading
from pathlib import Path

from .errors import UnknownFieldError

ENV_VAR = "DIOPHOK_CATALOGUE"
_DATA = Path(__file__).parent / "data"
_lock = threading.Lock()
_fields = {}


def catalogue_dir(path=None):
    if path:
        return Path(path)
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else _DATA


def _read(path, fname):
    with open(catalogue_dir(path) / fname) as fh:
        return json.load(fh)


def field_entries(path=None):
    return _read(path, "fields.json")["fields"]


def find_field_by_poly(poly, path=None):
    poly = [int(c) for c in poly]
    for entry in field_entries(path):
        if [int(c) for c in entry["defining_poly"]] == poly:
            return entry
    return None


def get_field(name, path=None):
    from .nf import NumberField

    key = (str(catalogue_dir(path)), name)
    with _lock:
        hit = _fields.get(key)
    if hit is not None:
        return hit
    for entry in field_entries(path):
        if entry["name"] == name:
            field = NumberField([int(c) for c in entry["defining_poly"]], entry["integral_basis"], name)
            with _lock:
                _fields[key] = field
            return field
    raise UnknownFieldError(f"field {name!r} is not in the catalogue")


def get_extension(base, top, path=None):
    """Catalogue extension base -> top; Q embeds into everything, every field into itself."""
    from .nf import FieldExtension, trivial_extension

    kb = get_field(base, path) if isinstance(base, str) else base
    kt = get_field(top, path) if isinstance(top, str) else top
    if kb == kt:
        return trivial_extension(kb)
    if kb.degree == 1:
        return FieldExtension(kb, kt)
    for entry in _read(path, "fields.json").get("extensions", []):
        if entry["base"] == kb.name and entry["top"] == kt.name:
            return FieldExtension(kb, kt, entry["embedding"])
    raise UnknownFieldError(f"no catalogue embedding {kb.name} -> {kt.name}")


def curve_entries(path=None):
    return _read(path, "curves.json")["curves"]


def get_curve(name, path=None):
    from .curves import EllipticCurveData

    for entry in curve_entries(path):
        if entry["name"] == name:
            return EllipticCurveData.from_json(entry, path)
    raise UnknownFieldError(f"curve {name!r} is not in the catalogue")
