from ._utils import Stopwatch, print_inline, width_format
from ._random import RNG, sample_seed
from ._parallel import JOBS_ENV_VAR, default_n_jobs, parallel_map
