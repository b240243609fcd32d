# # Metrics at a glance
#
# Spatial errors compare directions, spectral distances compare magnitudes
# channel by channel, and embedding scores compare precomputed vectors.

# %%
import numpy as np

from foakit import FoaBuffer
from foakit.metrics import (
    clap_score,
    frechet_distance,
    kl_divergence,
    l1_azimuth,
    mel_distance,
    mrstft_distance,
    spatial_angle,
)

# %% [markdown]
# Azimuth differences wrap: -3.13 and +3.13 are neighbours, not opposites.

# %%
print("naive |a-b|:", abs(-3.13 - 3.13))
print("circular:   ", l1_azimuth(-3.13, 3.13))
print("spatial angle (0, pi/4) vs (pi/2, pi/4):", spatial_angle((0.0, np.pi / 4), (np.pi / 2, np.pi / 4)), "= pi/3")

# %% [markdown]
# Spectral distances.  Halving the gain changes every log-magnitude by ln 2,
# and the distance is the same whichever buffer comes first.

# %%
rng = np.random.default_rng(3)
x = rng.standard_normal((4, 8192))
a, b = FoaBuffer(x, 48000), FoaBuffer(0.5 * x, 48000)
print("stft:", mrstft_distance(a, b).to_dict())
print("mel: ", mel_distance(a, b).to_dict())
print("identical:", mrstft_distance(a, a).mean)

# %% [markdown]
# Embedding scores on synthetic vectors.  Real use feeds in embeddings from an
# external audio/text model.

# %%
ref = rng.standard_normal((500, 16))
print("FAD same set:", frechet_distance(ref, ref))
print("FAD shifted by 0.5 on every axis:", frechet_distance(ref, ref + 0.5), "(about 16 * 0.25 = 4)")
print("KL([.5,.5] || [.25,.75]):", kl_divergence([0.5, 0.5], [0.25, 0.75]))
print("CLAP of pairs (e1,e1), (e1,e2):", clap_score([[1, 0], [1, 0]], [[1, 0], [0, 1]]))
