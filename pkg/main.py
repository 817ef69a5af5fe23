import sys
import argparse

from main_helper import run

RELATIONS = ('st', 'cx', 'lcx', 'icx', 'sm', 'ism', 'dcx', 'idcx', 'uo', 'ccx', 'iccx', 'cp', 'cop')


class ArgumentParser(argparse.ArgumentParser):
    '''Exits with the error code 3 on malformed arguments, keeping 2 for Undetermined verdicts.'''
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def validate_arguments(args):
    if (args.samples < 2):
        raise ValueError("Samples must be at least 2.")
    if (args.lambda_nodes < 1):
        raise ValueError("Lambda nodes must be at least 1.")
    if (args.seed < 0):
        raise ValueError("Seed must be nonnegative.")
    if (args.equality_tol < 0 or args.psd_tol < 0):
        raise ValueError("Tolerances must be nonnegative.")
    if (args.n_jobs < 1):
        raise ValueError("Number of jobs must be at least 1.")
    if args.command == 'slepian':
        if (args.n < 1):
            raise ValueError("Dimension must be at least 1.")
        if len(args.a) == 1:
            args.a = args.a * args.n
        if len(args.a) != args.n:
            raise ValueError("Threshold must be one value or n values.")
    if args.command == 'catalog' and (args.n < 1):
        raise ValueError("Dimension must be at least 1.")
    return args

def _add_run_options(parser):
    parser.add_argument(
        "--seed", type=int, default=42,
        help="Root seed of the random stream. Default: 42.")
    parser.add_argument(
        "--samples", type=int, default=100000,
        help="Number of Monte-Carlo draws per estimate. Default: 100000.")
    parser.add_argument(
        "--lambda-nodes", dest="lambda_nodes", type=int, default=8,
        help="Number of Gauss-Legendre nodes on the interpolation path. Default: 8.")
    parser.add_argument(
        "--equality-tol", dest="equality_tol", type=float, default=1e-9,
        help="Relative tolerance of parameter equalities. Default: 1e-9.")
    parser.add_argument(
        "--psd-tol", dest="psd_tol", type=float, default=1e-9,
        help="Relative eigenvalue tolerance of cone tests. Default: 1e-9.")
    parser.add_argument(
        "--format", type=str, choices=('json', 'csv'), default='json',
        help="Report format. Default: 'json'.")
    parser.add_argument(
        "--out", type=str, default=None,
        help="Write the report to this path instead of standard output.")
    parser.add_argument(
        "--n-jobs", dest="n_jobs", type=int, default=1,
        help="Number of threads sampling Monte-Carlo blocks. Results do not depend on it.")
    parser.add_argument(
        "--verbose", type=int, default=0,
        help="Verbosity level of the log lines written to standard error.")

def _add_pair(parser):
    parser.add_argument(
        "x", type=str,
        help="Distribution spec of X: a path to a JSON file or inline JSON.")
    parser.add_argument(
        "y", type=str,
        help="Distribution spec of Y: a path to a JSON file or inline JSON.")

def import_user_arguments(argv=None):
    # import user arguments
    parser = ArgumentParser(description="Stochastic orders between elliptical distributions")
    commands = parser.add_subparsers(dest="command", required=True)
    check = commands.add_parser("check", help="Decide X <=_rel Y from the parameters.")
    _add_pair(check)
    check.add_argument("relation", type=str, choices=RELATIONS, help="The order relation.")
    verify = commands.add_parser("verify", help="Decide the relation and verify it by Monte-Carlo.")
    _add_pair(verify)
    verify.add_argument("relation", type=str, choices=RELATIONS, help="The order relation.")
    identity = commands.add_parser("identity", help="Check the interpolation identity for one catalog function.")
    _add_pair(identity)
    identity.add_argument("function", type=str, help="Catalog id of the test function, e.g. 'cross_product'.")
    slepian = commands.add_parser("slepian", help="Orthant probabilities along a correlation grid.")
    slepian.add_argument(
        "--builder", type=str, choices=('equicorrelated', 'ar1'), default='equicorrelated',
        help="Dispersion family. Default: 'equicorrelated'.")
    slepian.add_argument(
        "--generator", type=str, default='normal',
        help="Generator: 'normal', 'student_t:<nu>' or inline JSON. Default: 'normal'.")
    slepian.add_argument("--n", type=int, required=True, help="Dimension.")
    slepian.add_argument(
        "--rhos", type=float, nargs='+', required=True,
        help="Nondecreasing grid of correlation parameters.")
    slepian.add_argument(
        "--a", type=float, nargs='+', default=[0.0],
        help="Orthant threshold, one value or n values. Default: 0.")
    slepian.add_argument("--variance", type=float, default=1.0, help="Common variance. Default: 1.")
    slepian.add_argument(
        "--level", type=float, default=0.5,
        help="Level c of the tanh(min)/tanh(max) probabilities, compared with tanh(c). Default: 0.5.")
    moments = commands.add_parser("moments", help="Moment inequalities implied by the supermodular order.")
    _add_pair(moments)
    catalog = commands.add_parser("catalog", help="List the test functions of a relation.")
    catalog.add_argument("relation", type=str, choices=RELATIONS, help="The order relation.")
    catalog.add_argument("n", type=int, help="Dimension.")
    for subparser in (check, verify, identity, slepian, moments, catalog):
        _add_run_options(subparser)
    args = parser.parse_args(argv)
    return args


if __name__ == "__main__":
    args = import_user_arguments()
    try:
        args = validate_arguments(args)
    except ValueError as error:
        print(f"error: {error}", file=sys.stderr)
        sys.exit(3)
    sys.exit(run(**vars(args)))
