TRUNC = (4, 4)

# two poles joined by three paths of length two
THETA_PAIRS = [(1, 3), (3, 2), (1, 4), (4, 2), (1, 5), (5, 2)]
K4_PAIRS = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
K5_PAIRS = [(u, v) for u in range(1, 6) for v in range(u + 1, 6)]
K33_PAIRS = [(u, v) for u in (1, 2, 3) for v in (4, 5, 6)]

ALL_GRAPH_TOTALS = {1: 1, 2: 2, 3: 8, 4: 64, 5: 1023}
CONNECTED_TOTALS = {1: 1, 2: 1, 3: 4, 4: 38, 5: 727}
FOREST_TOTALS = {1: 1, 2: 2, 3: 7, 4: 38, 5: 291}
TREE_TOTALS = {1: 1, 2: 1, 3: 3, 4: 16, 5: 125}
