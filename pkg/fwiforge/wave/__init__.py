from ._source import RickerWavelet, ricker, make_wavelet
from ._model import PaddedModel, sponge_profile, pad_with_sponge
from ._propagator import (COURANT_BOUND, check_stability, laplacian, Wavefield,
                          propagate_shot, forward_model, first_break)
