"""Recover generator parameters from the Laurent-polynomial projection of a point."""
import random

from qkadelic.config import EngineConfig
from qkadelic.loopspace import project_plus_seq
from qkadelic.qk_point import random_params, reconstruct, theorem2_generate

cfg = EngineConfig(D=3, R=6, M_max=4, E=10)
rng = random.Random(5)

for trial in range(3):
    params = random_params(rng, cfg)
    point = theorem2_generate(params, cfg)
    targets = project_plus_seq(point)
    recovered, rebuilt = reconstruct(targets, cfg)
    print(f"trial {trial}:")
    for r, t in enumerate(targets, start=1):
        print(f"  [f_{r}]_+ = {t}")
    print("  parameters recovered exactly:", recovered == params.truncate(cfg.D))
    print("  point rebuilt exactly:       ", rebuilt == point)
