from ._layers import draw_count, layer_thicknesses, layer_velocities, gen_flat_layers
from ._deform import (fold_shift, apply_fold, FaultLine, apply_fault,
                      RandomTransformation, RandomFold, RandomFault, get_transformation)
from ._generator import (FAMILIES, PRESETS, GeneratorConfig, get_preset,
                         VelocityGenerator, synthesize_batch)
