import os

from pathos.multiprocessing import ProcessPool


JOBS_ENV_VAR = 'FWI_FORGE_JOBS'


def default_n_jobs():
    """Number of workers taken from the environment (1 if unset)."""
    value = os.environ.get(JOBS_ENV_VAR)
    if not value:
        return 1
    try:
        n_jobs = int(value)
    except ValueError:
        raise ValueError("{0} must be an integer, got '{1}'".format(JOBS_ENV_VAR, value))
    return max(1, n_jobs)


def parallel_map(func, items, n_jobs=1):
    """Apply `func` to every item, preserving order.

    With `n_jobs` == 1 this is a plain `map`; otherwise items are
    spread over a process pool. Results always come back in item
    order, so any reduction done by the caller is independent
    of the number of workers.

    Examples
    --------
    >>> parallel_map(abs, [-1, 2, -3])
    [1, 2, 3]
    """
    items = list(items)
    if n_jobs is None:
        n_jobs = default_n_jobs()
    n_jobs = min(int(n_jobs), len(items))
    if n_jobs <= 1:
        return [func(item) for item in items]
    pool = ProcessPool(nodes=n_jobs)
    try:
        return list(pool.map(func, items))
    finally:
        pool.close()
        pool.join()
        pool.clear()


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
