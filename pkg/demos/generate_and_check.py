"""Generate a random point of the cone, certify it, then break it and watch the checker object."""
import random

from qkadelic.config import EngineConfig
from qkadelic.lambda_ring import tau
from qkadelic.qfun import LaurentPoly, RationalQ
from qkadelic.qk_point import check_theorem1_pt, expected_T, random_params, theorem2_generate

cfg = EngineConfig(D=2, R=4, M_max=3, E=6)
params = random_params(random.Random(11), cfg)
print("parameters:", params.to_json())

point = theorem2_generate(params, cfg)
for r, f in enumerate(point.entries, start=1):
    print(f"f_{r} = {f}")

cert = check_theorem1_pt(point)
print("\ncertificate passed:", cert.passed)
for r in range(1, cfg.R + 1):
    print(f"  T_{r} = {cert.T[r]}   (predicted {expected_T(params, r, cfg.D)})")
print("  unchecked cells outside the window:", len(cert.unchecked))

# tau9 (1 - q)/(1 - q^2) = tau9/(1 + q) is regular at q = 1 but has a pole at q = -1
# that no twisted tangent space can absorb.
eps = RationalQ(LaurentPoly({0: tau(9, D=cfg.D), 1: -tau(9, D=cfg.D)}), (2,))
cert = check_theorem1_pt(point.replace(1, point[1] + eps))
print("\nafter adding tau9/(1+q) to f_1:")
for cid in cert.failed:
    v = cert.cells[cid]
    print(f"  {cid}: {v.reason}; witness {v.witness}")
