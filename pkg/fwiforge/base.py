import json
import hashlib
from copy import deepcopy

import numpy as np

from .utils.read_write import save_params


MAX_LINE_WIDTH = 75
MAX_VALUE_WIDTH = 256


def _is_public(name):
    return not name.startswith('_')

def _is_param(name):
    """Constructor parameters; trailing-underscore names are derived
    attributes and are not restored by `reset_params`."""
    return _is_public(name) and not name.endswith('_')

def import_trace(module_name, discard_underscore_packages=True):
    """Return the shortest public dotted path of module `module_name`,
    dropping private (underscore-prefixed) components that are
    re-exported by their parent package.

    Examples
    --------
    >>> import_trace('fwiforge.synth._generator')
    'fwiforge.synth'
    >>> import_trace('fwiforge.wave._propagator', discard_underscore_packages=False)
    'fwiforge.wave._propagator'
    """
    parts = module_name.split('.')
    if discard_underscore_packages:
        parts = [p for p in parts if not p.startswith('_')]
    if not parts:
        raise ValueError("module name '{0}' has no public components".format(module_name))
    return '.'.join(parts)

def _short_repr(value, printer):
    with np.printoptions(precision=5, threshold=32, edgeitems=2):
        s = printer(value)
    if len(s) > MAX_VALUE_WIDTH:
        s = s[:192] + '...' + s[-64:]
    return s

def pformat(params, offset, printer=repr):
    """Format `params` as sorted `key=value` items, wrapped so no
    line exceeds MAX_LINE_WIDTH characters when printed after a
    prefix of `offset` characters.

    Examples
    --------
    >>> pformat({'b': 2, 'a': 'x'}, offset=4)
    "a='x', b=2"
    >>> print(pformat({'cutoffs': (1., 3.), 'bounds': (1500., 4500.)}, offset=60))
    bounds=(1500.0, 4500.0),
            cutoffs=(1.0, 3.0)
    """
    indent = min(1 + offset // 2, 8) * ' '
    lines, line = [], ''
    width = offset
    for key, value in sorted(params.items()):
        item = "{0}={1}".format(key, _short_repr(value, printer))
        if line and (width + len(item) + 2 >= MAX_LINE_WIDTH or '\n' in item):
            lines.append(line + ',')
            line, width = indent + item, len(indent) + len(item)
        elif line:
            line += ', ' + item
            width += 2 + len(item)
        else:
            line, width = item, width + len(item)
    lines.append(line)
    return '\n'.join(l.rstrip() for l in '\n'.join(lines).split('\n'))

def _to_tuples(value):
    if isinstance(value, list):
        return tuple(_to_tuples(v) for v in value)
    if isinstance(value, dict):
        return {k: _to_tuples(v) for k, v in value.items()}
    return value


class BaseParams(object):
    """Base class for all parameter sets (generator, acquisition,
    inversion).

    Subclasses assign their parameters in `__init__` and call
    `super().__init__()` last, which validates them and stores
    the defaults for `reset_params`.
    """

    def __init__(self):
        self._check_params()
        self._store_default_params()

    def _check_params(self):
        """Class-specific validation routine."""
        pass

    def model_name(self):
        return self.__class__.__name__

    def get_params(self, deep=True, **params_mask):
        """Get parameters of the object.

        Parameters
        ----------
        deep : bool, optional
            Whether to deepcopy all the parameters.
        params_mask : kwargs, optional
            Enables to control which parameters to include/exclude.
            If some parameters set to True, return only them.
            If some parameters set to False, return all excluding them.
            If there are mixed parameters, ValueError is raised.

        Returns
        -------
        params : dict
            Parameters of the object and also its class path
            stored as 'model'.
        """
        if all(x in map(bool, params_mask.values()) for x in (False, True)):
            raise ValueError('`params_mask` cannot contain True and False values simultaneously')

        params = vars(self)
        params = {key: params[key] for key in params if _is_public(key)}

        if params_mask:
            if list(params_mask.values())[0]:
                params = {key: params[key] for key in params if key in params_mask}
            else:
                params = {key: params[key] for key in params if not key in params_mask}

        trace = import_trace(self.__class__.__module__)
        params['model'] = '.'.join([trace, self.__class__.__name__])
        if deep:
            params = deepcopy(params)
        return params

    def to_dict(self):
        """Parameters as a JSON-friendly dict (without the class path)."""
        params = self._serialize(self.get_params())
        del params['model']
        return params

    def params_hash(self):
        """SHA-256 of the canonical JSON form of the parameters."""
        blob = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode('utf-8')).hexdigest()

    def _store_default_params(self):
        params = vars(self)
        params = {key: params[key] for key in params if _is_param(key)}
        self._default_params = deepcopy(params)

    def reset_params(self):
        """Restore default params (that were passed to the constructor).

        Returns
        -------
        self
        """
        for key, value in self._default_params.items():
            setattr(self, key, value)
        return self

    def set_params(self, **params):
        """Set parameters of the object.

        Parameters
        ----------
        params : kwargs
            New parameters and their values.

        Returns
        -------
        self
        """
        for key, value in params.items():
            if _is_public(key) and hasattr(self, key):
                setattr(self, key, value)
        self._check_params()
        return self

    def _serialize(self, params):
        """Convert tuples to lists so that `params` survive JSON."""
        return json.loads(json.dumps(params))

    def _deserialize(self, params):
        return _to_tuples(params)

    def save(self, filepath=None, params_mask={}, json_params={}):
        save_params(self, filepath, params_mask, json_params)

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):
        class_name = self.__class__.__name__
        params = self.get_params(deep=False)
        del params['model']
        return "{0}({1})".format(class_name,
                                 pformat(params, offset=len(class_name)))


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
