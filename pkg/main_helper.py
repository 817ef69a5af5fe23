import json
import sys
import warnings
from pathlib import Path
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

from ellorder.distribution import EllipticalDistribution, check_comparable
from ellorder.engine import OrderRelation, Verdict, check_order, check_univariate, explain
from ellorder.testfn import catalog_for, find_function
from ellorder.verifier import Verifier
from ellorder.wire import envelope, parse_distribution, parse_generator, report_to_csv, report_to_json
from ellorder.utils.messages import emit

EXIT_CODES = {Verdict.HOLDS: 0, Verdict.FAILS: 1, Verdict.UNDETERMINED: 2}
EXIT_ERROR = 3
OUTPUT_FORMATS = ('json', 'csv')

Spec = Union[str, Path, dict]


@dataclass
class RunConfig:
    seed: int = 42
    samples: int = 100000
    lambda_nodes: int = 8
    equality_tol: float = 1e-9
    psd_tol: float = 1e-9
    output_format: str = 'json'
    out: Optional[str] = None
    n_jobs: int = 1
    verbose: int = 0

    def __post_init__(self):
        if not isinstance(self.seed, int):
            raise TypeError(f"the 'seed' specified was of wrong type {type(self.seed)}, expected {int}.")
        if self.seed < 0:
            raise ValueError(f"the 'seed' specified was negative.")
        if not isinstance(self.samples, int):
            raise TypeError(f"the 'samples' specified was of wrong type {type(self.samples)}, expected {int}.")
        if self.samples < 2:
            raise ValueError(f"the 'samples' specified was less than 2.")
        if not isinstance(self.lambda_nodes, int):
            raise TypeError(f"the 'lambda_nodes' specified was of wrong type {type(self.lambda_nodes)}, expected {int}.")
        if self.lambda_nodes < 1:
            raise ValueError(f"the 'lambda_nodes' specified was less than 1.")
        for name in ('equality_tol', 'psd_tol'):
            value = getattr(self, name)
            if not isinstance(value, (int, float)):
                raise TypeError(f"the '{name}' specified was of wrong type {type(value)}, expected {float}.")
            if value < 0.0:
                raise ValueError(f"the '{name}' specified was negative.")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"the 'output_format' specified must be one of {OUTPUT_FORMATS}, got '{self.output_format}'.")
        if self.out is not None and not isinstance(self.out, str):
            raise TypeError(f"the 'out' path specified was of wrong type {type(self.out)}, expected {str}.")
        if not isinstance(self.n_jobs, int):
            raise TypeError(f"the 'n_jobs' specified was of wrong type {type(self.n_jobs)}, expected {int}.")
        if self.n_jobs < 1:
            raise ValueError(f"the 'n_jobs' specified was less than 1.")
        if not isinstance(self.verbose, int):
            raise TypeError(f"the 'verbose' specified was of wrong type {type(self.verbose)}, expected {int}.")

    def create_verifier(self) -> Verifier:
        return Verifier(seed=self.seed, samples=self.samples, lambda_nodes=self.lambda_nodes,
                        n_jobs=self.n_jobs, verbose=self.verbose)


def _load_pair(specX: Spec, specY: Spec) -> Tuple[EllipticalDistribution, EllipticalDistribution]:
    dX, dY = parse_distribution(specX), parse_distribution(specY)
    check_comparable(dX, dY)
    return dX, dY

def _decide(dX: EllipticalDistribution, dY: EllipticalDistribution, rel: OrderRelation, config: RunConfig):
    if dX.n == 1 and rel in (OrderRelation.ST, OrderRelation.CX, OrderRelation.ICX):
        return check_univariate(dX, dY, rel, equality_tol=config.equality_tol)
    return check_order(dX, dY, rel, equality_tol=config.equality_tol, psd_tol=config.psd_tol)

def _inputs(dX: EllipticalDistribution, dY: EllipticalDistribution, **extra) -> dict:
    return {'X': dX.to_dict(), 'Y': dY.to_dict(), **extra}

def cmd_check(specX: Spec, specY: Spec, relation: str, config: RunConfig) -> Tuple[dict, int]:
    """Decides X <=_relation Y from the parameters. Exit code 0 Holds, 1 Fails, 2 Undetermined."""
    rel = OrderRelation.parse(relation)
    dX, dY = _load_pair(specX, specY)
    report = _decide(dX, dY, rel, config)
    content = envelope('check', inputs=_inputs(dX, dY, relation=rel.value), report=report, explanation=explain(report))
    return content, EXIT_CODES[report.verdict]

def cmd_verify(specX: Spec, specY: Spec, relation: str, config: RunConfig) -> Tuple[dict, int]:
    """
    Decides the relation from the parameters, then estimates the catalog differences by Monte-Carlo.
    The two agree when the verdict is Holds with no violation, or Fails. Exit code 0 on agreement,
    1 when a Holds verdict meets a violation, 2 when the verdict is Undetermined.
    """
    rel = OrderRelation.parse(relation)
    dX, dY = _load_pair(specX, specY)
    report = _decide(dX, dY, rel, config)
    verification = config.create_verifier().verify_order_mc(
        dX, dY, rel, equality_tol=config.equality_tol, psd_tol=config.psd_tol)
    if report.verdict is Verdict.HOLDS:
        agree = verification.consistent
    else:
        agree = report.verdict is Verdict.FAILS
    content = envelope(
        'verify', inputs=_inputs(dX, dY, relation=rel.value, seed=config.seed, samples=config.samples),
        check=report, verification=verification, agree=agree)
    if report.verdict is Verdict.UNDETERMINED:
        return content, 2
    return content, 0 if agree else 1

def cmd_identity(specX: Spec, specY: Spec, function: str, config: RunConfig) -> Tuple[dict, int]:
    dX, dY = _load_pair(specX, specY)
    f = find_function(function)
    result = config.create_verifier().identity_check(dX, dY, f, K=config.lambda_nodes)
    content = envelope(
        'identity', inputs=_inputs(dX, dY, function=f.id, lambda_nodes=config.lambda_nodes,
                                   seed=config.seed, samples=config.samples),
        result=result)
    return content, 0 if result.consistent else 1

def cmd_slepian(builder: str, generator: Union[str, dict], n: int, rhos: Sequence[float], a: Sequence[float],
                config: RunConfig, variance: float = 1.0, level: float = 0.5) -> Tuple[dict, int]:
    """Orthant probabilities along a correlation grid. Exit code 0 when monotone, 1 otherwise."""
    gen = parse_generator(generator)
    report = config.create_verifier().slepian_suite(builder, gen, n, rhos, a, variance=variance, level=level)
    return envelope('slepian', report=report), 0 if report.monotone else 1

def cmd_moments(specX: Spec, specY: Spec, config: RunConfig) -> Tuple[dict, int]:
    dX, dY = _load_pair(specX, specY)
    report = config.create_verifier().moment_suite(dX, dY)
    content = envelope('moments', inputs=_inputs(dX, dY, seed=config.seed, samples=config.samples), report=report)
    return content, 0 if report.consistent else 1

def cmd_catalog(relation: str, n: int) -> Tuple[dict, int]:
    rel = OrderRelation.parse(relation)
    functions = [f.to_dict() for f in catalog_for(rel, n)]
    return envelope('catalog', relation=rel.value, n=n, functions=functions), 0


def write_report(content: dict, config: RunConfig) -> None:
    text = report_to_json(content) + '\n' if config.output_format == 'json' else report_to_csv(content)
    if config.out is None:
        sys.stdout.write(text)
        return
    path = Path(config.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)

def execute(command: str, config: RunConfig, **arguments) -> Tuple[dict, int]:
    if command == 'check':
        return cmd_check(arguments['x'], arguments['y'], arguments['relation'], config)
    elif command == 'verify':
        return cmd_verify(arguments['x'], arguments['y'], arguments['relation'], config)
    elif command == 'identity':
        return cmd_identity(arguments['x'], arguments['y'], arguments['function'], config)
    elif command == 'slepian':
        return cmd_slepian(arguments['builder'], arguments['generator'], arguments['n'], arguments['rhos'],
                           arguments['a'], config, variance=arguments.get('variance', 1.0),
                           level=arguments.get('level', 0.5))
    elif command == 'moments':
        return cmd_moments(arguments['x'], arguments['y'], config)
    elif command == 'catalog':
        return cmd_catalog(arguments['relation'], arguments['n'])
    else:
        raise NotImplementedError(f"Your requested command '{command}' is not available.")

def run(command: str, seed: int = 42, samples: int = 100000, lambda_nodes: int = 8,
        equality_tol: float = 1e-9, psd_tol: float = 1e-9, format: str = 'json', out: str = None,
        n_jobs: int = 1, verbose: int = 0, **arguments) -> int:
    """Runs one command, writes its report and returns the process exit code."""
    if not isinstance(command, str):
        raise TypeError(f"the 'command' specified was of wrong type {type(command)}, expected {str}.")
    try:
        config = RunConfig(
            seed=seed, samples=samples, lambda_nodes=lambda_nodes, equality_tol=equality_tol, psd_tol=psd_tol,
            output_format=format, out=out, n_jobs=n_jobs, verbose=verbose)
        with warnings.catch_warnings():
            if verbose < 1:
                warnings.simplefilter('ignore', RuntimeWarning)
            content, code = execute(command, config, **arguments)
        write_report(content, config)
    except (ValueError, TypeError, OSError, NotImplementedError, json.JSONDecodeError) as error:
        emit(command, f"error: {error}")
        return EXIT_ERROR
    if verbose > 0:
        emit(command, f"finished with exit code {code}.")
    return code
