"""Decision and detection limits for fiber counts with background fibers.

Defaults: 100 graticule fields (0.785 mm^2), a mean background of
2.5 fibers/mm^2, s = 0.2 and a 0.1% false-positive rate.
"""
from nbcount import (
    DetectionConfig,
    NormalSignalModel,
    background_count_quantile,
    background_sd,
    detection_limit_dl,
    detection_probability,
    lod_nb,
    lod_normal,
    lod_uncorrected,
)
from nbcount.detection import background_cdf_curves

cfg = DetectionConfig()
print(f"background count mean : {cfg.background_count:.4f}")
print(f"count quantile        : {background_count_quantile(cfg)}")
print(f"LOD (count law)       : {lod_nb(cfg):.2f} mm^-2")
normal = lod_normal(NormalSignalModel(sigma0=1.5))
print(f"LOD (normal, 3 sigma) : {normal:.2f} mm^-2, {lod_uncorrected(normal, cfg):.1f} with background added back")
print(f"background sd         : {background_sd(cfg):.3f} mm^-2")

dl = detection_limit_dl(cfg)
print(f"DL at 80% power       : {dl:.2f} mm^-2 (about {dl * cfg.area:.1f} counts)")
for density in (5, 10, dl, 15, 20):
    print(f"  Pr[detect | {density:5.2f} mm^-2] = {detection_probability(density, cfg):.3f}")

# The normal model understates the upper tail of the background.
print("\nbias-corrected density, count-law cdf, normal cdf")
for density, nb, nm in background_cdf_curves(cfg)[:12]:
    print(f"  {density:7.2f} {nb:.5f} {nm:.5f}")
