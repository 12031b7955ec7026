import numpy as np


def _seed_words(seed):
    """Split a non-negative integer seed into little-endian 32-bit words.

    Examples
    --------
    >>> _seed_words(7)
    7
    >>> _seed_words(2 ** 32 + 5)
    [5, 1]
    """
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative, got {0}".format(seed))
    if seed < 2 ** 32:
        return seed
    words = []
    while seed:
        words.append(seed & 0xFFFFFFFF)
        seed >>= 32
    return words


class RNG(np.random.RandomState):
    """Class encapsulating random number generator.

    Creates RNG from `seed`:
    If `seed` is None, return default RNG.
    If `seed` is int or [int], return new RNG instance seeded with it.
    Integers wider than 32 bits are split into 32-bit words, so
    any 64-bit seed is accepted.

    Raises
    ------
    TypeError
        If `seed` is none from the above.

    Examples
    --------
    >>> rng = RNG(1337)
    >>> rng.rand()
    0.2620246750155817
    >>> rng.rand()
    0.1586839721544656
    >>> rng.reseed()
    >>> rng.rand()
    0.2620246750155817
    >>> RNG(2 ** 63 + 1).rand() == RNG(2 ** 63 + 1).rand()
    True
    """
    def __init__(self, seed=None):
        self._seed = seed
        super(RNG, self).__init__(self._words())

    def _words(self):
        if self._seed is None or isinstance(self._seed, (list, tuple, np.ndarray)):
            return self._seed
        return _seed_words(self._seed)

    def reseed(self):
        if self._seed is not None:
            self.seed(self._words())


def sample_seed(seed, index):
    """Seed of the `index`-th sample of a batch seeded with `seed`."""
    return int(seed) + int(index)


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
