import json
import enum
import dataclasses

import numpy as np


def to_builtin(obj):
    """Recursively converts dataclasses, enums and numpy values into JSON-compatible builtins."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {field.name: to_builtin(getattr(obj, field.name)) for field in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(key): to_builtin(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_builtin(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return to_builtin(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        # JSON has no representation of non-finite values
        return value if np.isfinite(value) else str(value)
    return obj

def dict_to_json(dictionary) -> str:
    """
    Convert a report object into a deterministic JSON string.
    Floats are written with repr, the shortest text that round-trips (at most 17 significant digits).
    """
    return json.dumps(to_builtin(dictionary), sort_keys=True, indent=2)
