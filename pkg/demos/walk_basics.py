"""
A Hadamard walk, step by step
=============================

Start a walker at the origin with its coin in H, toss a Hadamard coin and
shift H to the right and V to the left.  After a few steps the distribution
turns lopsided, unlike a classical random walk.
"""

import numpy as np

from dtqw.core import probability_distribution
from dtqw.walk import HADAMARD, InitialCondition, SplitStep, evolve

# four steps: most of the weight has drifted to j = +2
state = evolve(InitialCondition(), HADAMARD, 4)
for j, p in probability_distribution(state).items():
    print(f"j = {j:+d}   P = {p:.4f}   coin = {np.round(state[j], 4)}")

# a symmetric initial coin keeps the distribution symmetric
sym = evolve(InitialCondition(0, (1 / np.sqrt(2), 1j / np.sqrt(2))), HADAMARD, 40)
dist = probability_distribution(sym)
print("symmetric start, 40 steps, <j> =", round(sum(j * p for j, p in dist.items()), 12))

# ballistic spreading: the standard deviation grows linearly in n
for n in (10, 20, 40, 80):
    d = probability_distribution(evolve(InitialCondition(), SplitStep(0.4, 1.1), n))
    j = np.array(list(d)), np.array(list(d.values()))
    sigma = np.sqrt(np.sum(j[1] * j[0] ** 2) - np.sum(j[1] * j[0]) ** 2)
    print(f"split-step n = {n:3d}  sigma/n = {sigma / n:.4f}")
