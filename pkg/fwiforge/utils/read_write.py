import json
import hashlib
import importlib

import numpy as np
from numpy.lib import format as npy_format

from ..exceptions import DimensionError, FormatError, UnsupportedFormatError


NPY_DTYPE = np.dtype('<f4')
NPY_VERSION = (1, 0)


def write_npy(array, filepath):
    """Write `array` to `filepath` as an NPY v1.0 file of little-endian
    32-bit floats in C order.

    Parameters
    ----------
    array : 2D, 3D or 4D array-like
        Data to store; quantized to float32.
    filepath : str
        Destination path.

    Examples
    --------
    >>> import os, tempfile
    >>> path = os.path.join(tempfile.mkdtemp(), 'x.npy')
    >>> write_npy([[3.5]], path)
    >>> os.path.getsize(path)
    132
    >>> print(read_npy(path))
    [[3.5]]
    """
    array = np.asarray(array)
    if array.ndim not in (2, 3, 4):
        raise DimensionError("only 2D, 3D and 4D arrays can be written, got {0}D".format(array.ndim))
    data = np.ascontiguousarray(array, dtype=NPY_DTYPE)
    header = {'descr': npy_format.dtype_to_descr(NPY_DTYPE),
              'fortran_order': False,
              'shape': data.shape}
    with open(filepath, 'wb') as f:
        npy_format.write_array_header_1_0(f, header)
        f.write(data.tobytes(order='C'))


def read_npy(filepath):
    """Read an NPY v1.0 file written by `write_npy`.

    Returns
    -------
    array : np.ndarray
        float32 array with the stored shape.

    Raises
    ------
    FormatError
        If magic string, header or payload are malformed or truncated.
    UnsupportedFormatError
        If the file declares another version, dtype or Fortran order.
    """
    with open(filepath, 'rb') as f:
        try:
            version = npy_format.read_magic(f)
        except ValueError as e:
            raise FormatError("'{0}': bad magic string ({1})".format(filepath, e))
        if version != NPY_VERSION:
            raise UnsupportedFormatError("'{0}': unsupported NPY version {1}".format(filepath, version))
        try:
            shape, fortran_order, dtype = npy_format.read_array_header_1_0(f)
        except (ValueError, SyntaxError) as e:
            raise FormatError("'{0}': malformed header ({1})".format(filepath, e))
        if fortran_order:
            raise UnsupportedFormatError("'{0}': Fortran-ordered arrays are not supported".format(filepath))
        if dtype != NPY_DTYPE:
            raise UnsupportedFormatError("'{0}': expected dtype '<f4', got '{1}'".format(filepath, dtype.str))
        n_bytes = int(np.prod(shape, dtype=np.int64)) * NPY_DTYPE.itemsize
        payload = f.read(n_bytes)
    if len(payload) != n_bytes:
        raise FormatError("'{0}': truncated payload ({1} of {2} bytes)".format(filepath, len(payload), n_bytes))
    return np.frombuffer(payload, dtype=NPY_DTYPE).reshape(shape).copy()


def file_checksum(filepath, chunk_size=1 << 20):
    """SHA-256 hex digest of the file contents."""
    sha = hashlib.sha256()
    with open(filepath, 'rb') as f:
        for chunk in iter(lambda: f.read(chunk_size), b''):
            sha.update(chunk)
    return sha.hexdigest()


def save_params(params_obj, filepath=None, params_mask={}, json_params={}):
    filepath = filepath or 'params.json'
    params = params_obj.get_params(deep=False, **params_mask)
    params = params_obj._serialize(params)
    with open(filepath, 'w') as f:
        json.dump(params, f, **json_params)


def load_params(filepath=None):
    filepath = filepath or 'params.json'
    with open(filepath) as f:
        params = json.load(f)

    if not 'model' in params:
        raise ValueError("missed required field: 'model'")
    model_path = params.pop('model')

    module_path, class_name = model_path.rsplit('.', 1)
    module = importlib.import_module(module_path)
    params_class = getattr(module, class_name, None)

    if params_class:
        obj = params_class()
        params = obj._deserialize(params)
        obj.set_params(**params)
        obj._store_default_params()
        return obj

    raise ValueError("cannot find class '{0}'".format(model_path))


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
