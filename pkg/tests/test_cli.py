import io
import json
import os
import tempfile
import unittest
import warnings
from contextlib import redirect_stderr

import pandas as pd

import main
from main_helper import RunConfig, EXIT_ERROR, cmd_check, cmd_verify, cmd_identity, cmd_slepian, cmd_moments, cmd_catalog, run
from ellorder.wire import validate_report


def spec(location, dispersion, generator=None):
    return {"dim": len(location), "location": location, "dispersion": dispersion,
            "generator": generator or {"type": "normal"}}

LOW = spec([0.0, 0.0, 0.0], [[1.0, 0.2, 0.2], [0.2, 1.0, 0.2], [0.2, 0.2, 1.0]])
HIGH = spec([0.0, 0.0, 0.0], [[1.0, 0.5, 0.5], [0.5, 1.0, 0.5], [0.5, 0.5, 1.0]])


class TestCommandLine(unittest.TestCase):

    def setUp(self):
        self.config = RunConfig(seed=7, samples=20000)
        self.catcher = warnings.catch_warnings()
        self.catcher.__enter__()
        warnings.simplefilter('ignore', RuntimeWarning)

    def tearDown(self):
        self.catcher.__exit__(None, None, None)

    def test_check(self):
        content, code = cmd_check(spec([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]),
                                  spec([0.5, 0.0], [[1.0, 0.0], [0.0, 1.0]]), 'st', self.config)
        validate_report(content)
        self.assertEqual(code, 0)
        self.assertEqual(content['inputs']['relation'], 'st')
        self.assertIn("Holds", content['explanation'])
        content, code = cmd_check(spec([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]),
                                  spec([0.0, 0.0], [[1.0, 0.5], [0.5, 1.0]]), 'icx', self.config)
        self.assertEqual(code, 2)
        self.assertEqual(content['report']['verdict'], 'Undetermined')
        _, code = cmd_check(HIGH, LOW, 'sm', self.config)
        self.assertEqual(code, 1)
        content, code = cmd_check(spec([0.0], [[1.0]]), spec([0.0], [[2.0]]), 'cx', self.config)
        self.assertEqual(code, 0)

    def test_verify(self):
        content, code = cmd_verify(LOW, HIGH, 'sm', self.config)
        validate_report(content)
        self.assertEqual(code, 0)
        self.assertTrue(content['agree'])
        _, code = cmd_verify(LOW, LOW, 'sm', self.config)
        self.assertEqual(code, 0)
        content, code = cmd_verify(HIGH, LOW, 'sm', self.config)
        self.assertEqual(code, 0)
        self.assertEqual(content['check']['verdict'], 'Fails')
        self.assertIsNotNone(content['verification']['swapped'])
        loose = RunConfig(seed=7, samples=5000, equality_tol=1e-3)
        near = spec([0.0, 0.0, 0.0], [[1.0, 0.2 + 1e-6, 0.2], [0.2 + 1e-6, 1.0, 0.2], [0.2, 0.2, 1.0]])
        content, _ = cmd_verify(LOW, near, 'st', loose)
        self.assertEqual(content['check']['verdict'], 'Holds')
        self.assertEqual(content['verification']['verdict'], 'Holds')

    def test_identity(self):
        content, code = cmd_identity(LOW, HIGH, 'cross_product', self.config)
        validate_report(content)
        self.assertEqual(code, 0)
        self.assertEqual(content['inputs']['function'], 'cross_product')
        self.assertAlmostEqual(content['result']['rhs']['value'], 0.3, places=12)

    def test_slepian_and_moments(self):
        content, code = cmd_slepian('equicorrelated', 'student_t:5', 3, [0.0, 0.3, 0.6], [0.0], self.config)
        validate_report(content)
        self.assertEqual(code, 0)
        self.assertTrue(content['report']['monotone'])
        content, code = cmd_moments(LOW, HIGH, self.config)
        validate_report(content)
        self.assertEqual(code, 0)

    def test_catalog(self):
        content, code = cmd_catalog('sm', 3)
        validate_report(content)
        self.assertEqual(code, 0)
        self.assertGreaterEqual(len(content['functions']), 5)
        self.assertEqual(content['relation'], 'sm')

    def test_run_writes_report(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'reports', 'check.json')
            code = run('check', x=json.dumps(LOW), y=json.dumps(HIGH), relation='sm', out=path)
            self.assertEqual(code, 0)
            with open(path) as handle:
                content = json.load(handle)
            validate_report(content)
            self.assertEqual(content['report']['verdict'], 'Holds')
            path = os.path.join(directory, 'catalog.csv')
            self.assertEqual(run('catalog', relation='cx', n=2, format='csv', out=path), 0)
            with open(path) as handle:
                frame = pd.read_csv(io.StringIO(handle.read()))
            self.assertEqual(list(frame.columns), ['function', 'classes', 'arity', 'growth'])

    def test_run_errors(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'out.json')
            other = spec([0.0, 0.0, 0.0], LOW['dispersion'], {"type": "student_t", "nu": 5})
            self.assertEqual(run('check', x=LOW, y=other, relation='st', out=path), EXIT_ERROR)
            self.assertEqual(run('check', x='{"dim": 3', y=HIGH, relation='st', out=path), EXIT_ERROR)
            self.assertEqual(run('check', x=LOW, y=HIGH, relation='xx', out=path), EXIT_ERROR)
            self.assertEqual(run('plot', out=path), EXIT_ERROR)
            self.assertEqual(run('catalog', relation='sm', n=1, out=path), EXIT_ERROR)
            self.assertEqual(run('catalog', relation='sm', n=3, samples=1, out=path), EXIT_ERROR)
            self.assertFalse(os.path.exists(path))

    def test_run_config(self):
        with self.assertRaises(ValueError):
            RunConfig(output_format='xml')
        with self.assertRaises(TypeError):
            RunConfig(seed=1.0)
        with self.assertRaises(ValueError):
            RunConfig(n_jobs=0)
        self.assertEqual(self.config.create_verifier().samples, 20000)

    def test_arguments(self):
        args = main.import_user_arguments(['slepian', '--n', '3', '--rhos', '0', '0.5', '--a', '0.1'])
        args = main.validate_arguments(args)
        self.assertEqual(args.a, [0.1, 0.1, 0.1])
        self.assertEqual(args.builder, 'equicorrelated')
        self.assertEqual(args.generator, 'normal')
        args = main.import_user_arguments(['check', 'x.json', 'y.json', 'sm', '--n-jobs', '2'])
        self.assertEqual((args.x, args.relation, args.n_jobs, args.samples), ('x.json', 'sm', 2, 100000))
        with self.assertRaises(ValueError):
            main.validate_arguments(main.import_user_arguments(['catalog', 'sm', '0']))
        with self.assertRaises(ValueError):
            main.validate_arguments(main.import_user_arguments(['slepian', '--n', '3', '--rhos', '0', '--a', '0', '1']))
        with open(os.devnull, 'w') as devnull:
            with redirect_stderr(devnull), self.assertRaises(SystemExit) as context:
                main.import_user_arguments(['plot'])
        self.assertEqual(context.exception.code, 3)


if __name__ == '__main__':
    unittest.main()
