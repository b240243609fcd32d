# # Encoding a source and finding it again
#
# A mono signal becomes four channels once we say where it comes from.  W
# carries the pressure scaled by 1/sqrt(2); X, Y and Z carry the pressure
# weighted by the direction cosines.  Multiplying W with each directional
# channel gives an intensity vector that points back at the source.

# %%
import numpy as np

from foakit import MonoBuffer, SphericalPosition, encode_foa, intensity_vectors, estimate_doa, localize
from foakit.foa import ChannelConvention, convert_convention, decode_virtual_mic

sr = 48000
rng = np.random.default_rng(0)
noise = MonoBuffer(rng.uniform(-0.5, 0.5, sr), sr)

# %% [markdown]
# Place the noise 60 degrees to the left and slightly above the horizon.

# %%
where = SphericalPosition(azimuth=np.pi / 3, elevation=0.2)
foa = encode_foa(noise, where)
print("channel RMS (W, X, Y, Z):", np.sqrt(np.mean(foa.data**2, axis=1)).round(4))

# %% [markdown]
# Frame-wise intensity vectors, then one energy-weighted estimate.

# %%
track = intensity_vectors(foa, frame_len=1024, hop=512)
print(len(track), "frames; first vector", track.vectors[0].round(5))
est = estimate_doa(track)
print(f"azimuth {est.azimuth:.9f} (truth {where.azimuth:.9f})")
print(f"elevation {est.elevation:.9f} (truth {where.elevation:.9f})")
print(f"distance proxy {est.distance_proxy:.5f}  (pressure-squared units, not meters)")

# %% [markdown]
# Scaling the recording by k leaves the direction alone and scales the proxy
# by k squared.

# %%
louder = localize(foa.scaled(4.0))
print("same direction:", (louder.azimuth, louder.elevation) == (est.azimuth, est.elevation))
print("proxy ratio:", louder.distance_proxy / est.distance_proxy)

# %% [markdown]
# Virtual microphones: a cardioid aimed at the source keeps most of the
# energy, one aimed the opposite way keeps almost none.

# %%
towards = decode_virtual_mic(foa, where, pattern=0.5)
away = decode_virtual_mic(foa, SphericalPosition(where.azimuth - np.pi, -where.elevation), pattern=0.5)
print("cardioid towards / away RMS:", np.sqrt(np.mean(towards.samples**2)).round(4), np.sqrt(np.mean(away.samples**2)).round(6))

# %% [markdown]
# The same buffer in AmbiX layout (W, Y, Z, X with unscaled W).

# %%
ambix = convert_convention(foa, ChannelConvention.FUMA_EQ1, ChannelConvention.AMBIX)
print("AmbiX first sample:", ambix.data[:, 0].round(5))
