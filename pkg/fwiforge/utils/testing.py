import pytest


def run_tests(script_path, test_module=None):
    """
    Run tests which are contained in `test_module` for script
    whose location is specified in `script_path` (typically, is
    called as __file__), including the script's doctests.
    """
    params = [script_path]
    if test_module:
        params.append(test_module.__file__)
    params.append('--doctest-modules')
    return pytest.main(params)


run_tests.__test__ = False
