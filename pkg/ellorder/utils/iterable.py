from typing import Any, Dict, Sequence


def split_number_evenly(number: int, n: int) -> list:
    """Splits an integer into n parts that differ by at most one, larger parts last."""
    if n < 1:
        raise ValueError("the number of parts must be at least 1.")
    parts = number // n
    rest = number % n
    return [parts] * (n - rest) + [parts + 1] * rest

def flatten_dict(dictionary: Dict[str, Any], exclude: Sequence[str] = (), delimiter: str = '_') -> Dict[str, Any]:
    flat_dict = dict()
    for key, value in dictionary.items():
        if isinstance(value, dict) and key not in exclude:
            flatten_value_dict = flatten_dict(value, exclude, delimiter)
            for k, v in flatten_value_dict.items():
                flat_dict[f"{key}{delimiter}{k}"] = v
        else:
            flat_dict[key] = value
    return flat_dict
