"""Synthetic paired-view Gaussian mixtures with controlled correlations.

Each data point is built from a latent standard normal ``z`` shared by the
two views:

    x = g_r * A @ z         + noise + mean_x_r
    y = g_r * B @ (s_r * z) + noise + mean_y_r

with orthonormal direction matrices A, B shared by all components, unit
isotropic noise, and per-component sign vectors ``s_r`` and gains
``g_r = sqrt(rho_r / (1 - rho_r))``.  The gain makes the population
canonical correlation along each latent direction exactly ``rho_r`` (scaling
the signal instead of the noise is equivalent for CCA and keeps rho = 0
well defined).  With ``cancel`` the second component's signs all flip, so
the two cross-covariances cancel in the pooled data while each component
keeps correlation rho; ``flip_count`` flips only the trailing latent
dimensions, leaving the rest correlated at the population level too.
"""

from dataclasses import dataclass

import numpy as np

from .data import PairedDataset
from .errors import ConfigError
from .seeding import STREAM_SYNTH_COMPONENT, STREAM_SYNTH_DIRECTIONS, derive_rng
from .validation import check_nonnegative, check_positive_int


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic dataset."""

    r_components: int = 2
    d_x: int = 8
    d_y: int = 8
    k_true: int = 1
    rho: tuple | float = 0.9
    mean_separation: float = 0.0
    n_per_component: int = 1000
    cancel: bool = False
    flip_count: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "r_components",
                           check_positive_int(self.r_components, "r_components"))
        object.__setattr__(self, "d_x", check_positive_int(self.d_x, "d_x"))
        object.__setattr__(self, "d_y", check_positive_int(self.d_y, "d_y"))
        object.__setattr__(self, "k_true", check_positive_int(self.k_true, "k_true"))
        if self.k_true > min(self.d_x, self.d_y):
            raise ConfigError(
                f"k_true={self.k_true} exceeds min(d_x, d_y)={min(self.d_x, self.d_y)}"
            )
        rho = self.rho if np.ndim(self.rho) else [float(self.rho)] * self.r_components
        rho = tuple(float(v) for v in rho)
        if len(rho) != self.r_components:
            raise ConfigError(
                f"rho must be a scalar or have one entry per component, got {len(rho)}"
            )
        if any(not 0.0 <= v < 1.0 for v in rho):
            raise ConfigError("every rho must lie in [0, 1)")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "mean_separation",
                           check_nonnegative(self.mean_separation, "mean_separation"))
        object.__setattr__(self, "n_per_component",
                           check_positive_int(self.n_per_component, "n_per_component"))
        if self.n_per_component < self.k_true + 1:
            raise ConfigError(
                f"n_per_component must be at least k_true + 1 = {self.k_true + 1}"
            )
        flips = self.flip_count
        if flips is None:
            flips = self.k_true if self.cancel else 0
        flips = int(flips)
        if not 0 <= flips <= self.k_true:
            raise ConfigError(f"flip_count must lie in [0, {self.k_true}], got {flips}")
        if flips > 0 and self.r_components != 2:
            raise ConfigError("sign-flipped construction requires exactly 2 components")
        object.__setattr__(self, "flip_count", flips)
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class GroundTruth:
    """Generating quantities: directions, signs, gains, means, latents."""

    x_directions: np.ndarray
    y_directions: np.ndarray
    latent_signs: np.ndarray
    signal_gains: np.ndarray
    mean_x: np.ndarray
    mean_y: np.ndarray
    rho: tuple
    latents: np.ndarray


def _orthonormal(rng, d, k):
    q, r = np.linalg.qr(rng.standard_normal((d, k)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def generate(spec: SynthSpec):
    """Draw a dataset from ``spec``.

    Returns ``(PairedDataset, GroundTruth)`` with ``groups`` set to the true
    component of every point (points of component r are contiguous).
    """
    r_comp, k_true = spec.r_components, spec.k_true
    rng_dir = derive_rng(spec.seed, STREAM_SYNTH_DIRECTIONS)
    a = _orthonormal(rng_dir, spec.d_x, k_true)
    b = _orthonormal(rng_dir, spec.d_y, k_true)

    signs = np.ones((r_comp, k_true))
    if spec.flip_count:
        signs[1, k_true - spec.flip_count :] = -1.0
    gains = np.array([np.sqrt(rho / (1.0 - rho)) for rho in spec.rho])

    # Component means sit along the first signal direction, spaced so that
    # consecutive components are mean_separation within-cluster stds apart.
    # The largest component's std along that direction, sqrt(1 + gain^2),
    # sets a common spacing unit so means never collide under mixed rho.
    mean_x = np.zeros((spec.d_x, r_comp))
    mean_y = np.zeros((spec.d_y, r_comp))
    if spec.mean_separation > 0:
        unit = spec.mean_separation * float(np.sqrt(1.0 + gains.max() ** 2))
        for r in range(r_comp):
            mean_x[:, r] = unit * (r + 1) * a[:, 0]
            mean_y[:, r] = unit * (r + 1) * b[:, 0]

    n = spec.n_per_component
    blocks_x, blocks_y, blocks_z = [], [], []
    for r in range(r_comp):
        rng = derive_rng(spec.seed, STREAM_SYNTH_COMPONENT, r)
        z = rng.standard_normal((k_true, n))
        x = gains[r] * (a @ z) + rng.standard_normal((spec.d_x, n)) + mean_x[:, r : r + 1]
        y = (gains[r] * (b @ (signs[r][:, None] * z))
             + rng.standard_normal((spec.d_y, n)) + mean_y[:, r : r + 1])
        blocks_x.append(x)
        blocks_y.append(y)
        blocks_z.append(z)

    groups = np.repeat(np.arange(r_comp), n)
    dataset = PairedDataset(np.hstack(blocks_x), np.hstack(blocks_y),
                            groups=groups, group_count=r_comp)
    truth = GroundTruth(a, b, signs, gains, mean_x, mean_y, spec.rho,
                        np.hstack(blocks_z))
    return dataset, truth
