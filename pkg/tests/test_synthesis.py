from dataclasses import replace

import numpy as np
import pytest

from patchswd import synthesis as S
from patchswd import textures
from patchswd.imaging import build_pyramid, gaussian_blur, resize
from patchswd.metrics import distance_report
from patchswd.swd import ImageTooSmallError, extract_patches, patch_swd, swd_loss_and_grad_with_filters

FAST = dict(num_steps=60, coarse_dim=20)


def noise_like(img, seed=0, sigma=1.5):
    return np.random.default_rng(seed).normal(0.0, sigma, img.shape)


# --- configuration ---------------------------------------------------------

def test_reshuffle_preset_values():
    c = S.RESHUFFLE
    assert (c.pyramid_factor, c.coarse_dim, c.scale_factors, c.init_mode) == (0.85, 28, (1.0, 1.0), S.InitMode.ZEROS)
    assert (c.noise_sigma, c.patch_size, c.stride, c.num_projections) == (1.5, 7, 1, 64)
    assert (c.learning_rate, c.num_steps) == (0.05, 300)


def test_task_presets():
    assert (S.RETARGET.coarse_dim, S.RETARGET.num_projections, S.RETARGET.noise_sigma) == (35, 128, 0.0)
    assert S.RETARGET.init_mode is S.InitMode.BLURRED_TARGET
    assert (S.STYLE.patch_size, S.STYLE.init_mode, S.STYLE.noise_sigma) == (11, S.InitMode.PROVIDED_IMAGE, 0.0)
    assert S.TEXTURE.scale_factors == (2.0, 2.0) and S.TEXTURE.init_mode is S.InitMode.ZEROS
    assert S.EDIT.init_mode is S.InitMode.PROVIDED_IMAGE and S.EDIT.noise_sigma == 0.0


@pytest.mark.parametrize("bad", [
    dict(pyramid_factor=1.0), dict(pyramid_factor=0.0), dict(coarse_dim=0), dict(patch_size=0),
    dict(stride=0), dict(num_projections=0), dict(num_steps=-1), dict(noise_sigma=-0.1),
    dict(learning_rate=0.0), dict(patch_size=30, coarse_dim=28), dict(scale_factors=(1.0, 0.0)),
    dict(init_mode="nonsense"),
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        S.SynthesisConfig(**bad)


def test_blur_sigma():
    assert S.blur_sigma((30, 40), 0.5) == pytest.approx(2 * 1.0 * 50 / 100)


# --- synthesize ------------------------------------------------------------

def test_zero_steps_with_target_init(blob_texture):
    cfg = replace(S.RESHUFFLE, init_mode="target", noise_sigma=0.0, num_steps=0)
    out = S.synthesize(blob_texture, cfg)
    assert out.shape == blob_texture.shape
    # oracle: coarsest target level, upscaled level by level and clipped after each
    pyramid = build_pyramid(blob_texture, cfg.pyramid)
    y = np.clip(pyramid[0], -1, 1)
    for level in pyramid[1:]:
        y = np.clip(resize(y, *level.shape[:2]), -1, 1)
    assert np.array_equal(out, y)
    # close to the target up to resampling blur
    assert np.mean(np.abs(out - blob_texture)) < 0.15


def test_determinism(small_texture):
    a = S.reshuffle(small_texture, seed=4, **FAST)
    b = S.reshuffle(small_texture, seed=4, **FAST)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("mode", list(S.InitMode))
def test_output_range(small_texture, mode):
    cfg = S.SynthesisConfig(init_mode=mode, learning_rate=0.5, **FAST)
    init = small_texture[::-1] if mode is S.InitMode.PROVIDED_IMAGE else None
    out = S.synthesize(small_texture, cfg, init=init)
    assert out.min() >= -1.0 and out.max() <= 1.0


def test_too_small_target():
    with pytest.raises(ImageTooSmallError):
        S.synthesize(np.zeros((5, 30, 3)), S.SynthesisConfig(num_steps=1))


def test_provided_image_needs_init(small_texture):
    with pytest.raises(ValueError):
        S.synthesize(small_texture, S.EDIT)


def test_callback_and_monotone_progress(small_texture):
    losses = {}
    S.synthesize(small_texture, replace(S.RESHUFFLE, **FAST),
                 callback=lambda lvl, step, loss: losses.setdefault(lvl, []).append(loss))
    assert len(losses) == len(build_pyramid(small_texture, replace(S.RESHUFFLE, **FAST).pyramid))
    for seq in losses.values():
        assert len(seq) == FAST["num_steps"]
        assert np.median(seq[-10:]) <= np.median(seq[:10])


# --- reshuffle -------------------------------------------------------------

def test_reshuffle_converges_dims_and_discriminates(small_texture):
    out = S.reshuffle(small_texture, seed=0, **FAST)
    assert out.shape == small_texture.shape
    d_out = patch_swd(small_texture, out)
    assert d_out <= 0.1 * patch_swd(small_texture, noise_like(small_texture))
    unrelated = textures.stripes(32, 32, seed=9)
    assert d_out < patch_swd(small_texture, unrelated)


def test_reshuffle_diversity(small_texture):
    a = S.reshuffle(small_texture, seed=0, **FAST)
    b = S.reshuffle(small_texture, seed=1, **FAST)
    assert np.mean(np.abs(a - b) > 0.05) > 0.01


# --- retarget --------------------------------------------------------------

def test_retarget_same_size(small_texture):
    out = S.retarget(small_texture, (1, 1), num_steps=20, coarse_dim=20, num_projections=32)
    assert out.shape == small_texture.shape


def test_retarget_width_doubles():
    target = textures.blobs(24, 100, seed=5)
    out = S.retarget(target, (1, 2), num_steps=5, coarse_dim=16, num_projections=16)
    assert out.shape == (24, 200, 3)


def test_retarget_keeps_stripes():
    target = textures.stripes(32, 32, period=6, seed=3, vertical=True, noise=0.03, wobble=0.0)
    kw = dict(num_steps=60, coarse_dim=20)
    same = S.retarget(target, (1, 1), **kw)
    tall = S.retarget(target, (2, 1), **kw)
    assert tall.shape == (64, 32, 3)
    c_same = distance_report(target, same).coherence
    c_tall = distance_report(target, tall).coherence
    assert c_tall <= 2 * c_same


# --- style transfer --------------------------------------------------------

def test_style_equal_to_content_is_fixed_point(small_texture):
    out = S.style_transfer(small_texture, small_texture, num_steps=60)
    assert out.shape == small_texture.shape
    assert np.mean(np.abs(out - small_texture)) < 0.01


def test_style_improves_and_keeps_content_dims():
    content = textures.noise_texture(28, 36, seed=1)
    style = textures.stripes(32, 32, seed=2)
    out = S.style_transfer(content, style, num_steps=60)
    assert out.shape == content.shape
    assert patch_swd(style, out, patch_size=11) < patch_swd(style, content, patch_size=11)


# --- texture synthesis -----------------------------------------------------

def test_texture_doubles_and_converges(small_texture):
    out = S.texture_synthesize(small_texture, seed=0, **FAST)
    assert out.shape == (64, 64, 3)
    ratio = patch_swd(small_texture, out) / patch_swd(small_texture, noise_like(out))
    assert ratio <= 0.15
    tiled = np.tile(small_texture, (2, 2, 1))
    print(f"tiling diagnostic: bds tiled={distance_report(small_texture, tiled).bds:.3f} "
          f"ours={distance_report(small_texture, out).bds:.3f}")


# --- editing ---------------------------------------------------------------

def test_edit_fixed_point(small_texture):
    out = S.edit_harmonize(small_texture, small_texture, num_steps=40, coarse_dim=20)
    assert np.mean(np.abs(out - small_texture)) < 0.01


def test_edit_shape_mismatch(small_texture):
    with pytest.raises(ValueError):
        S.edit_harmonize(small_texture[:30], small_texture)


def pasted_rectangle(target):
    crude = target.copy()
    patch = textures.stripes(12, 12, period=3, seed=4)
    crude[10:22, 10:22] = patch
    return crude


def seam_coherence(img, target, p=7):
    """Mean nearest-target-patch distance of patches straddling the pasted rectangle's border."""
    from patchswd.metrics import nearest_neighbors

    h, w = img.shape[:2]
    nh, nw = h - p + 1, w - p + 1
    rr, cc = np.mgrid[0:nh, 0:nw]
    inside = lambda a, lo, hi: (a < hi) & (a + p > lo)
    straddle = inside(rr, 10, 22) & inside(cc, 10, 22)
    straddle &= ~((rr >= 10) & (rr + p <= 22) & (cc >= 10) & (cc + p <= 22))
    _, dist = nearest_neighbors(extract_patches(img, p)[straddle.ravel()], extract_patches(target, p))
    return dist.mean()


def test_edit_harmonizes_seams(small_texture):
    crude = pasted_rectangle(small_texture)
    out = S.edit_harmonize(crude, small_texture, num_steps=60, coarse_dim=20)
    assert seam_coherence(out, small_texture) < seam_coherence(crude, small_texture)


def test_edit_determinism(small_texture):
    crude = pasted_rectangle(small_texture)
    a = S.edit_harmonize(crude, small_texture, seed=3, num_steps=10, coarse_dim=20)
    b = S.edit_harmonize(crude, small_texture, seed=3, num_steps=10, coarse_dim=20)
    assert np.array_equal(a, b)


# --- frequency mask --------------------------------------------------------

def test_mask_boost_one_is_identity(small_texture):
    m = S.apply_frequency_mask(small_texture, S.FrequencyMask(np.ones((32, 32)), 1), 7)
    assert m.shape == (26 * 26,) and np.all(m == 1)


def test_mask_uses_patch_centres():
    mask = np.zeros((10, 10), dtype=bool)
    mask[3, 3] = True  # centre of the patch at the top-left corner for p=7
    m = S.apply_frequency_mask(np.zeros((10, 10, 1)), S.FrequencyMask(mask, 5), 7)
    assert m.tolist() == [5] + [1] * 15


def test_mask_validation():
    with pytest.raises(ValueError):
        S.FrequencyMask(np.ones((4, 4)), 0)
    with pytest.raises(ValueError):
        S.FrequencyMask(np.ones((4, 4)), 1.5)
    with pytest.raises(ValueError):
        S.apply_frequency_mask(np.zeros((8, 8, 3)), S.FrequencyMask(np.ones((4, 4))), 3)


def test_uniform_boost_leaves_loss_unchanged(small_texture, rng):
    y = rng.uniform(-1, 1, small_texture.shape)
    filters = rng.standard_normal((16, 7, 7, 3))
    filters /= np.linalg.norm(filters.reshape(16, -1), axis=1)[:, None, None, None]
    boost = S.apply_frequency_mask(small_texture, S.FrequencyMask(np.ones((32, 32)), 3), 7)
    assert np.all(boost == 3)
    plain, g_plain = swd_loss_and_grad_with_filters(small_texture, y, filters)
    boosted, g_boosted = swd_loss_and_grad_with_filters(small_texture, y, filters, target_augment=boost)
    assert boosted == pytest.approx(plain, rel=1e-12)
    assert np.allclose(g_boosted, g_plain, atol=1e-12)


def test_half_mask_increases_masked_share():
    target, labels = textures.two_region(32, 40, fraction=0.5, seed=3)
    mask = S.FrequencyMask(labels == 1, boost_factor=4)
    cfg = replace(S.RESHUFFLE, **FAST)
    plain = S.synthesize(target, cfg)
    boosted = S.synthesize(target, cfg, mask=mask)
    share = lambda img: np.mean(S.nearest_patch_classes(img, target, labels) == 1)
    print(f"masked-class share: unmasked={share(plain):.3f} boosted={share(boosted):.3f}")
    assert share(boosted) > share(plain)


def test_nearest_patch_classes_on_target():
    target, labels = textures.two_region(24, 30, fraction=0.5, seed=1)
    cls = S.nearest_patch_classes(target, target, labels)
    expected = labels[3:21, 3:27].ravel()
    assert np.array_equal(cls, expected)
