"""Leaf census of the baseline protocol and a random subcube protocol."""

from binclique.comm import baseline_protocol, distributional_error, leaf_census, random_subcube_protocol
from binclique.density import min_almost_complete
from binclique.graph import sample_graph
from binclique.triangles import CliqueSplit

G = sample_graph(16, 0.95, 3, 5)
split = CliqueSplit(G)
s = min_almost_complete(G).s_star
print(f"s* = {s}")
for name, P in [("baseline", baseline_protocol(split)), ("random", random_subcube_protocol(3, 2, 3, 1))]:
    census = leaf_census(P, split, s)
    applied = [r for r in census.records if r.applies]
    print(f"{name}: cost {P.cost()}, error {distributional_error(P, split).error:.4f}, "
          f"{len(census.records)} leaves, bound applies to {len(applied)}, "
          f"violations {len(census.violations)}")
    print(census.to_csv())
