"""
Wire formats: the JSON distribution spec read by the command line and the report envelopes it writes.

Distribution spec:
    {"dim": 2, "location": [0, 0], "dispersion": [[1, 0], [0, 1]],
     "generator": {"type": "normal" | "student_t" | "radial_discrete", "nu": 5, "atoms": [[r, w], ...]}}

Every report envelope carries "schema", "command" and the command specific keys listed in REPORT_KEYS.
"""
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd

from .distribution import EllipticalDistribution, GeneratorSpec, GENERATORS
from .utils.conversion import to_builtin, dict_to_json
from .utils.iterable import flatten_dict

SCHEMA_VERSION = 1
VERDICTS = ('Holds', 'Fails', 'Undetermined')
REPORT_KEYS = {
    'check': ('inputs', 'report', 'explanation'),
    'verify': ('inputs', 'check', 'verification', 'agree'),
    'identity': ('inputs', 'result'),
    'slepian': ('report',),
    'moments': ('inputs', 'report'),
    'catalog': ('relation', 'n', 'functions')}


class DistributionSpecError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ReportSchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)

def _number(value: Any, path: str) -> float:
    if not _is_number(value):
        raise DistributionSpecError(path, f"expected a finite number, got {value!r}")
    return float(value)

def _generator(spec: Any, path: str) -> GeneratorSpec:
    if not isinstance(spec, dict):
        raise DistributionSpecError(path, "expected an object")
    kind = spec.get('type')
    if kind not in GENERATORS:
        raise DistributionSpecError(f"{path}.type", f"expected one of {sorted(GENERATORS)}, got {kind!r}")
    try:
        if kind == 'student_t':
            return GENERATORS[kind](nu=_number(spec.get('nu'), f"{path}.nu"))
        if kind == 'radial_discrete':
            atoms = spec.get('atoms')
            if not isinstance(atoms, list) or not atoms:
                raise DistributionSpecError(f"{path}.atoms", "expected a nonempty array of [radius, weight] pairs")
            pairs = []
            for i, atom in enumerate(atoms):
                if not isinstance(atom, list) or len(atom) != 2:
                    raise DistributionSpecError(f"{path}.atoms[{i}]", "expected a [radius, weight] pair")
                pairs.append((_number(atom[0], f"{path}.atoms[{i}][0]"), _number(atom[1], f"{path}.atoms[{i}][1]")))
            return GENERATORS[kind](atoms=tuple(pairs))
        return GENERATORS[kind]()
    except DistributionSpecError:
        raise
    except (TypeError, ValueError) as error:
        raise DistributionSpecError(path, str(error)) from error

def distribution_from_dict(spec: Any) -> EllipticalDistribution:
    if not isinstance(spec, dict):
        raise DistributionSpecError('$', "expected an object")
    for key in ('dim', 'location', 'dispersion', 'generator'):
        if key not in spec:
            raise DistributionSpecError(f"$.{key}", "missing")
    dim = spec['dim']
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DistributionSpecError('$.dim', f"expected a positive integer, got {dim!r}")
    location = spec['location']
    if not isinstance(location, list) or len(location) != dim:
        raise DistributionSpecError('$.location', f"expected an array of {dim} numbers")
    mu = [_number(value, f"$.location[{i}]") for i, value in enumerate(location)]
    dispersion = spec['dispersion']
    if not isinstance(dispersion, list) or len(dispersion) != dim:
        raise DistributionSpecError('$.dispersion', f"expected {dim} rows")
    sigma = []
    for i, row in enumerate(dispersion):
        if not isinstance(row, list) or len(row) != dim:
            raise DistributionSpecError(f"$.dispersion[{i}]", f"expected an array of {dim} numbers")
        sigma.append([_number(value, f"$.dispersion[{i}][{j}]") for j, value in enumerate(row)])
    gen = _generator(spec['generator'], '$.generator')
    try:
        return EllipticalDistribution(mu, sigma, gen)
    except ValueError as error:
        raise DistributionSpecError('$.dispersion' if 'dispersion' in str(error) else '$', str(error)) from error

def parse_distribution(source: Union[str, Path, dict, list]) -> EllipticalDistribution:
    """Parses a spec given as decoded JSON, a path to a JSON file, or inline JSON text."""
    if isinstance(source, (dict, list)):
        return distribution_from_dict(source)
    if not isinstance(source, (str, Path)):
        raise TypeError(f"the 'source' specified was of wrong type {type(source)}, expected {str} or {Path}.")
    text = str(source)
    if not text.lstrip().startswith(("{", "[")):
        path = Path(text)
        if not path.is_file():
            raise DistributionSpecError('$', f"'{text}' is neither inline JSON nor a readable file")
        text = path.read_text()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as error:
        raise DistributionSpecError('$', f"invalid JSON: {error}") from error
    return distribution_from_dict(spec)

def parse_generator(source: Union[str, dict]) -> GeneratorSpec:
    """Parses a generator given as a dict, inline JSON, or shorthand 'normal' / 'student_t:5'."""
    if isinstance(source, dict):
        return _generator(source, '$')
    if not isinstance(source, str):
        raise TypeError(f"the 'source' specified was of wrong type {type(source)}, expected {str}.")
    if source.lstrip().startswith('{'):
        try:
            return _generator(json.loads(source), '$')
        except json.JSONDecodeError as error:
            raise DistributionSpecError('$', f"invalid JSON: {error}") from error
    name, _, parameter = source.partition(':')
    if name == 'student_t':
        try:
            nu = float(parameter)
        except ValueError as error:
            raise DistributionSpecError('$.nu', f"expected a number after 'student_t:', got {parameter!r}") from error
        return _generator({'type': name, 'nu': nu}, '$')
    if parameter:
        raise DistributionSpecError('$', f"generator '{name}' takes no shorthand parameter")
    return _generator({'type': name}, '$')

def envelope(command: str, **content) -> dict:
    """Builds a report envelope of JSON builtins."""
    if command not in REPORT_KEYS:
        raise ValueError(f"unknown command '{command}'.")
    return to_builtin({'schema': SCHEMA_VERSION, 'command': command, **content})

def report_to_json(report: dict) -> str:
    return dict_to_json(report)


def _require(obj: Any, key: str, path: str, kind=None) -> Any:
    if not isinstance(obj, dict):
        raise ReportSchemaError(path, "expected an object")
    if key not in obj:
        raise ReportSchemaError(f"{path}.{key}", "missing")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ReportSchemaError(f"{path}.{key}", f"expected {kind}, got {type(value).__name__}")
    return value

def _validate_estimate(obj: Any, path: str) -> None:
    for key in ('value', 'std_error'):
        value = _require(obj, key, path)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ReportSchemaError(f"{path}.{key}", "expected a number")
    if _require(obj, 'std_error', path) < 0:
        raise ReportSchemaError(f"{path}.std_error", "must be >= 0")
    _require(obj, 'samples', path, int)

def _validate_order(obj: Any, path: str) -> None:
    _require(obj, 'relation', path, str)
    if _require(obj, 'verdict', path, str) not in VERDICTS:
        raise ReportSchemaError(f"{path}.verdict", f"expected one of {VERDICTS}")
    _require(obj, 'basis', path, str)
    witness = _require(obj, 'witness', path)
    if witness is not None:
        _require(witness, 'kind', f"{path}.witness", str)
        _require(witness, 'description', f"{path}.witness", str)
    _require(obj, 'conditions', path, list)

def _validate_verification(obj: Any, path: str) -> None:
    _require(obj, 'claim', path, str)
    _require(obj, 'consistent', path, bool)
    for i, row in enumerate(_require(obj, 'estimates', path, list)):
        _require(row, 'function', f"{path}.estimates[{i}]", str)
        _require(row, 'flagged', f"{path}.estimates[{i}]", bool)
        _validate_estimate(_require(row, 'estimate', f"{path}.estimates[{i}]"), f"{path}.estimates[{i}].estimate")
    _require(obj, 'violations', path, list)
    if obj.get('swapped') is not None:
        _validate_verification(obj['swapped'], f"{path}.swapped")

def validate_report(report: Any) -> None:
    """Raises ReportSchemaError at the first path that breaks the published report schema."""
    if _require(report, 'schema', '$', int) != SCHEMA_VERSION:
        raise ReportSchemaError('$.schema', f"expected {SCHEMA_VERSION}")
    command = _require(report, 'command', '$', str)
    if command not in REPORT_KEYS:
        raise ReportSchemaError('$.command', f"expected one of {sorted(REPORT_KEYS)}")
    for key in REPORT_KEYS[command]:
        _require(report, key, '$')
    if command == 'check':
        _validate_order(report['report'], '$.report')
    elif command == 'verify':
        _validate_order(report['check'], '$.check')
        _validate_verification(report['verification'], '$.verification')
        _require(report, 'agree', '$', bool)
    elif command == 'identity':
        result = report['result']
        _validate_estimate(_require(result, 'lhs', '$.result'), '$.result.lhs')
        _validate_estimate(_require(result, 'rhs', '$.result.rhs'), '$.result.rhs')
        _require(result, 'consistent', '$.result', bool)
    elif command == 'slepian':
        _require(report['report'], 'monotone', '$.report', bool)
        for i, step in enumerate(_require(report['report'], 'steps', '$.report', list)):
            _validate_estimate(_require(step, 'difference', f"$.report.steps[{i}]"), f"$.report.steps[{i}].difference")
    elif command == 'moments':
        _require(report['report'], 'consistent', '$.report', bool)
        for i, check in enumerate(_require(report['report'], 'checks', '$.report', list)):
            _validate_estimate(_require(check, 'difference', f"$.report.checks[{i}]"), f"$.report.checks[{i}].difference")
    elif command == 'catalog':
        for i, function in enumerate(_require(report, 'functions', '$', list)):
            _require(function, 'id', f"$.functions[{i}]", str)
            _require(function, 'classes', f"$.functions[{i}]", list)


def _estimate_row(claim: str, function: str, estimate: dict, flagged: bool) -> Dict[str, Any]:
    return {'claim': claim, 'function': function, 'estimate': estimate['value'],
            'std_error': estimate['std_error'], 'samples': estimate['samples'], 'flag': flagged}

def report_rows(report: dict) -> List[Dict[str, Any]]:
    """Flattens an envelope into rows of (claim, function, estimate, std_error, samples, flag)."""
    command = report['command']
    rows = []
    if command == 'check':
        order = report['report']
        row = {'claim': f"X <=_{order['relation']} Y", 'verdict': order['verdict'], 'basis': order['basis']}
        if order['witness'] is not None:
            row['witness'] = {key: value for key, value in order['witness'].items() if not isinstance(value, list)}
        rows.append(flatten_dict(row))
    elif command == 'verify':
        verification = report['verification']
        while verification is not None:
            rows += [_estimate_row(verification['claim'], row['function'], row['estimate'], row['flagged'])
                     for row in verification['estimates']]
            verification = verification.get('swapped')
    elif command == 'identity':
        result = report['result']
        rows += [_estimate_row('identity lhs', result['function'], result['lhs'], not result['consistent']),
                 _estimate_row('identity rhs', result['function'], result['rhs'], not result['consistent'])]
    elif command == 'slepian':
        rows += [_estimate_row(f"rho {step['rho_from']} -> {step['rho_to']}", step['quantity'], step['difference'], step['flagged'])
                 for step in report['report']['steps']]
    elif command == 'moments':
        rows += [_estimate_row(check['direction'], check['claim'], check['difference'], check['flagged'])
                 for check in report['report']['checks']]
    elif command == 'catalog':
        rows += [{'function': function['id'], 'classes': ' '.join(function['classes']), 'arity': function['arity'],
                  'growth': function['growth']} for function in report['functions']]
    return rows

def report_to_csv(report: dict) -> str:
    buffer = io.StringIO()
    pd.DataFrame(report_rows(report)).to_csv(buffer, index=False, float_format='%.17g')
    return buffer.getvalue()
