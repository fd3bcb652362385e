"""Random walk on a parity decision tree versus running it on sampled inputs."""

import random

from binclique.graph import sample_graph
from binclique.pdt import (NonEdgeInstance, pdt_to_sexpr, random_pdt, simulate_walk,
                           walk_distribution_test)

G = sample_graph(16, 0.75, 4, 11)
inst = NonEdgeInstance(G, [(3, 5)])
T = random_pdt(4, 4, 3, random.Random(2), blocks=inst.free_blocks)
print("tree:", pdt_to_sexpr(T, 16))

tr = simulate_walk(inst, T, random.Random(0))
print("one walk:", tr.to_json())

rep = walk_distribution_test(inst, T, 20000, 1)
print(f"total variation over {rep.trials} walks: {rep.tv:.4f}")
for path in sorted(rep.walk):
    print(f"  leaf {path or 'root':>4}  walk {rep.walk[path]:.4f}  direct {rep.direct[path]:.4f}")
