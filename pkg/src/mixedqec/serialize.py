"""JSON and CSV output with 12 significant digits."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from collections.abc import Iterable, Sequence

import numpy as np

from mixedqec.core import density_to_bloch
from mixedqec.discord import DiscordMapDataset, DiscordResult, MeasurementDirection, ProductMeasurement
from mixedqec.pauli import PauliString
from mixedqec.qec import ErrorChannel, RoundtripReport
from mixedqec.tomography import NoiseModel, SphereMesh, TomographyReport

SCHEMA_VERSION = "1"
DIGITS = 12

MESH_HEADER = ("theta", "phi", "in_x", "in_y", "in_z", "out_x", "out_y", "out_z")
DATASET_HEADER = ("theta", "phi", "value")


def fmt(x: float) -> str:
    s = f"{float(x):.{DIGITS}g}"
    return "0" if s == "-0" else s


def round_float(x: float) -> float:
    return float(fmt(x))


def to_jsonable(obj):
    """Recursively convert numpy, complex and dataclass values to JSON types."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": round_float(obj.real), "im": round_float(obj.imag)}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, PauliString):
        return str(obj)
    if isinstance(obj, MeasurementDirection):
        return {"m": to_jsonable(list(obj.m)), "theta": round_float(obj.theta), "phi": round_float(obj.phi)}
    if isinstance(obj, ProductMeasurement):
        return {"a": to_jsonable(obj.a), "b": to_jsonable(obj.b)}
    if isinstance(obj, ErrorChannel):
        return to_jsonable(list(obj.p))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return obj


def dumps(payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, **to_jsonable(payload)}
    return json.dumps(body, indent=2, sort_keys=False) + "\n"


def write_csv(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], np.ndarray]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [[float(v) for v in row] for row in reader if row]
    return header, np.array(rows, dtype=float).reshape(-1, len(header))


def dataset_csv(ds: DiscordMapDataset) -> str:
    return write_csv(DATASET_HEADER, ds.rows())


def dataset_json(ds: DiscordMapDataset, kind: str) -> dict:
    return {
        "kind": kind,
        "grid": list(ds.grid),
        "metadata": ds.metadata,
        "columns": list(DATASET_HEADER),
        "rows": ds.rows(),
    }


def mesh_csv(mesh: SphereMesh) -> str:
    return write_csv(MESH_HEADER, mesh.rows())


def noise_dict(noise: NoiseModel) -> dict:
    return dataclasses.asdict(noise)


def discord_dict(result: DiscordResult) -> dict:
    return {
        "value": result.value,
        "raw_value": result.raw_value,
        "argmin": result.argmin,
        "grid": result.grid,
        "iterations": result.iterations,
    }


def roundtrip_dict(rep: RoundtripReport) -> dict:
    return {
        "channel": rep.channel,
        "recovered_bloch": density_to_bloch(rep.recovered),
        "recovered": rep.recovered,
        "trace_distance": rep.trace_distance,
        "ancilla_residue": rep.ancilla,
        "expected_ancilla_residue": rep.expected_ancilla,
        "ancilla_error": rep.ancilla_error,
    }


def tomography_dict(rep: TomographyReport) -> dict:
    return {
        "channel": rep.channel,
        "noise": noise_dict(rep.noise),
        "ptm": rep.ptm,
        "chi": rep.chi,
        "kraus": rep.kraus.operators,
        "kraus_min_chi_eigenvalue": rep.kraus.min_chi_eigenvalue,
        "nonphysical": rep.kraus.nonphysical,
        "entanglement_fidelity": rep.entanglement_fidelity,
        "map_trace": rep.map_trace,
        "mesh_grid": list(rep.mesh.grid),
        "mesh_max_output_radius": float(np.linalg.norm(rep.mesh.outputs, axis=1).max()),
    }
