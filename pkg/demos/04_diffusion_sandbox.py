# # A diffusion model you can read in one sitting
#
# Latents are noised as z = alpha x0 + sigma eps with alpha = cos(pi t / 2),
# and the network predicts v = alpha eps - sigma x0.  From (z, v) both the
# clean latent and the noise come back exactly, which is all the sampler needs.

# %%
import numpy as np

from foakit import diffusion as dm

rng = np.random.default_rng(0)
x0 = rng.standard_normal((4, 3))
eps = rng.standard_normal((4, 3))
t = 0.3
z = dm.forward_noise(x0, eps, t)
v = dm.v_target(x0, eps, t)
print("x0 recovered:", np.allclose(dm.recover_x0(z, v, t), x0), " eps recovered:", np.allclose(dm.recover_eps(z, v, t), eps))

# %% [markdown]
# With a denoiser that knows the answer, one sampling step is already exact.

# %%
print(dm.sample(dm.OracleDenoiser(x0), steps=1, seed=5, shape=x0.shape) - x0)

# %% [markdown]
# Now a learned one.  The affine denoiser has time-varying coefficients on a
# 16-knot piecewise-linear grid and is trained by plain minibatch gradient
# descent on the v loss.  The target is a 2-D Gaussian.

# %%
mean, cov = dm.gaussian_target(2)
data = rng.multivariate_normal(mean, cov, size=20000)
result = dm.train_toy_denoiser(data, steps=20000, lr=0.05, seed=7)
print("held-out loss:", [round(l, 4) for l in result.heldout_loss[::40]])

# %%
samples = dm.sample(result.denoiser, steps=50, seed=8, shape=(10000, 2))
print("sample mean:", samples.mean(axis=0).round(3), " target:", mean)
print("sample cov:\n", np.cov(samples, rowvar=False).round(3), "\n target:\n", cov)

# %% [markdown]
# The gradients are written by hand, so check them against finite differences.

# %%
zz = rng.standard_normal((32, 2))
tt = rng.uniform(0, 1, 32)
print("max relative gradient error:", dm.gradient_check(result.denoiser, zz, tt, None, rng.standard_normal((32, 2))))
