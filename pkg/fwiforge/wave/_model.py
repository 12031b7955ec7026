import numpy as np

from ..exceptions import ConfigError


def sponge_profile(n, nbc, decay=3.):
    """Damping factors along one padded axis of length `n` + 2 `nbc`.

    Examples
    --------
    >>> p = sponge_profile(2, 3)
    >>> bool(np.all(p[3:5] == 1.)) and bool(np.isclose(p[0], np.exp(-9.)))
    True
    """
    d = np.arange(n + 2 * nbc)
    d = np.minimum(d, d[::-1])
    profile = np.exp(-(decay * (nbc - d) / float(nbc)) ** 2)
    profile[d >= nbc] = 1.
    return profile


class PaddedModel(object):
    """Velocity map extended by an absorbing sponge of `nbc` cells.

    Attributes
    ----------
    interior : VelocityMap
    nbc : int
    padded_values : (nz + 2 nbc, nx + 2 nbc) np.ndarray
        Velocities, edge-replicated into the sponge.
    damping : same shape as `padded_values`
        Per-cell attenuation in (0, 1], exactly 1 in the interior.
    """
    def __init__(self, interior, nbc, padded_values, damping):
        self.interior = interior
        self.nbc = nbc
        self.padded_values = padded_values
        self.damping = damping

    @property
    def shape(self):
        return self.padded_values.shape

    @property
    def dx(self):
        return self.interior.dx

    @property
    def interior_slice(self):
        return (slice(self.nbc, self.nbc + self.interior.nz),
                slice(self.nbc, self.nbc + self.interior.nx))

    def cells(self, positions):
        """Padded (row, col) index arrays for (x_cell, z_cell) positions."""
        positions = np.asarray(positions, dtype=int).reshape((-1, 2))
        return positions[:, 1] + self.nbc, positions[:, 0] + self.nbc


def pad_with_sponge(vmap, nbc, decay=3.):
    """Edge-replicate `vmap` into an `nbc`-cell border and build the
    damping mask exp(-(decay (nbc - d) / nbc)^2), d being the distance
    in cells to the outer edge.

    Examples
    --------
    >>> from fwiforge.grid import VelocityMap
    >>> model = pad_with_sponge(VelocityMap(np.full((70, 70), 1500.)), 120)
    >>> model.shape
    (310, 310)
    >>> float(model.damping[0, 0]) == float(np.exp(-9.)), float(model.damping[155, 155])
    (True, 1.0)
    """
    if nbc < 1:
        raise ConfigError("nbc must be >= 1, got {0}".format(nbc))
    padded = np.pad(vmap.values, nbc, mode='edge')
    damping = np.minimum(sponge_profile(vmap.nz, nbc, decay)[:, np.newaxis],
                         sponge_profile(vmap.nx, nbc, decay)[np.newaxis, :])
    return PaddedModel(vmap, nbc, padded, damping)
