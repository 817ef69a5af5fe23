import unittest

if __name__ == '__main__':
    from tests.test_distribution import TestDistribution, TestDispersionBuilders
    from tests.test_cones import TestCones
    from tests.test_special import TestSpecial
    from tests.test_sampler import TestSampler
    from tests.test_engine import TestEngine
    from tests.test_testfn import TestCatalog
    from tests.test_verifier import TestVerifier
    from tests.test_wire import TestWire
    from tests.test_cli import TestCommandLine
    print("unit tests running...")
    unittest.main()
    print("unit tests completed.")
