"""Named fixtures and JSON loaders for states, instruments, and boxes.

Fixture names resolve to built-in objects ("singlet", "z-instrument",
"x-instrument") or to packaged JSON files ("mutant-instrument",
"signaling-box", used to prove the verifiers are not vacuous).  Anything
else is treated as a filesystem path.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .boxes import Box, signaling_box
from .linalg import matrix_from_json, matrix_to_json
from .quantum import Instrument, KrausOp, singlet_state, x_instrument, z_instrument


def instrument_to_json(inst: Instrument) -> list:
    """One list per outcome, each holding that outcome's Kraus matrices."""
    return [[matrix_to_json(k) for k in op.kraus] for op in inst.outcomes]


def instrument_from_json(obj) -> Instrument:
    """Build and validate an instrument; incomplete ones raise."""
    return Instrument([KrausOp([matrix_from_json(k) for k in outcome]) for outcome in obj])


def _data_text(name: str) -> str:
    return resources.files("optheory").joinpath("data", name).read_text()


def data_path(name: str) -> Path:
    """Filesystem path of a packaged fixture file."""
    return Path(str(resources.files("optheory").joinpath("data", name)))


def _read_json(source: str):
    if Path(source).exists():
        return json.loads(Path(source).read_text())
    raise FileNotFoundError(f"fixture file not found: {source}")


def load_state(name_or_path: str) -> np.ndarray:
    if name_or_path == "singlet":
        return singlet_state()
    obj = _read_json(name_or_path)
    return matrix_from_json(obj)


def load_instrument(name_or_path: str) -> Instrument:
    if name_or_path == "z-instrument":
        return z_instrument()
    if name_or_path == "x-instrument":
        return x_instrument()
    if name_or_path == "mutant-instrument":
        return instrument_from_json(json.loads(_data_text("mutant_instrument.json")))
    return instrument_from_json(_read_json(name_or_path))


def load_box(name_or_path: str) -> Box:
    if name_or_path == "signaling-box":
        return Box.from_json(json.loads(_data_text("signaling_box.json")))
    if name_or_path == "pr-box":
        from .boxes import pr_box

        return pr_box()
    return Box.from_json(_read_json(name_or_path))


def write_builtin_fixtures(directory: str | Path) -> list[Path]:
    """Materialize all named fixtures as JSON files (used to seed data/)."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def dump(name: str, obj) -> None:
        path = out / name
        path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")
        written.append(path)

    dump("singlet.json", matrix_to_json(singlet_state()))
    dump("z_instrument.json", instrument_to_json(z_instrument()))
    dump("x_instrument.json", instrument_to_json(x_instrument()))
    mutant = Instrument(
        [KrausOp([np.sqrt(0.9) * np.eye(2)], check=False)], check=False
    )
    dump("mutant_instrument.json", instrument_to_json(mutant))
    dump("signaling_box.json", signaling_box().to_json())
    return written
