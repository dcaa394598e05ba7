# Pinch lengths t for the degeneration families, strictly decreasing
PUNCTURED_TORUS_PINCH = [1.0, 0.5, 0.25, 0.125, 0.0625]
GENUS_TWO_SEPARATING_PINCH = [1.0, 0.5, 0.25, 0.125, 0.0625]

# Generator convergence: punctured torus with len_a = ALGEBRAIC_BASE_LENGTH + t
ALGEBRAIC_CONVERGENCE = [0.25, 0.125, 0.0625, 0.03125, 0.015625]
ALGEBRAIC_BASE_LENGTH = 2.0

# Cusp strips C_delta, one quadrature check per delta
CUSP_DELTA_GRID = [0.5, 1.0, 2.0, 4.0]

# Funnel sectors F_delta, pairs (delta_0, delta) with delta > delta_0
FUNNEL_GRID = [
    (0.5, 2.0),
    (0.5, 3.0),
    (0.5, 4.0),
    (1.0, 2.0),
    (1.0, 3.0),
    (1.0, 4.0),
    (1.5, 2.0),
    (1.5, 3.0),
    (1.5, 4.0),
]

# Default parameters of the named group fixtures
FIXTURE_PARAMETERS = {
    "punctured_torus": {"len_a": 2.0, "len_b": 2.0, "twist": 0.0},
    "thrice_punctured_sphere": {"l1": 0.0, "l2": 0.0, "l3": 0.0},
    "pants": {"l1": 1.0, "l2": 1.0, "l3": 1.0},
    "genus_two": {"alpha": 1.0, "beta": 1.0, "gamma": 1.0},
    "cyclic": {"length": 2.0},
}

ESCAPE_STEPS = 8
ESCAPE_RADIUS = 3.0
