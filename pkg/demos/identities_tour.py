"""Run each identity suite, then show that a deliberate perturbation is caught."""
from qkadelic.expand import expand_at_one
from qkadelic.identities import RamificationProfile, ade_enumerate, hurwitz_euler
from qkadelic.qfun import RationalQ
from qkadelic.suites import SUITES, run_suite

print("Euler characteristic of the (2,2,2) profile over Z_2:", hurwitz_euler(RamificationProfile(2, 0, (2, 2, 2))))
print("realizable positive-Euler covers up to M=6:", [(p.M, p.orders) for p in ade_enumerate(6)])

for k in (1, 2, 5):
    s = expand_at_one(RationalQ.inv_one_minus(k), 2)
    print(f"1/(1-q^{k}) near q=1: {s}")

for name in SUITES:
    rows = run_suite(name)
    print(f"{name:16s} {sum(ok for *_, ok in rows)}/{len(rows)} identities hold")

rows = run_suite("box-delta", perturb=True)
print("box-delta with a perturbed side:", sum(not ok for *_, ok in rows), "failures detected")
