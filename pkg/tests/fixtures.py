"""Published tables transcribed literally, errata included."""

# (Q, NQI, IQI, PQI, X, Y)
GRAY_DECODER_TABLE = [
    (0, 3, 3, 3, 1, 0),
    (1, 0, 3, 3, 1, 1),
    (2, 0, 0, 3, 0, 1),
    (3, 0, 0, 0, 0, 0),
]

# (A, B, Ci, QS, QC), left half then right half of the printed table
ADDER_TABLE_LEFT = [
    (0, 0, 0, 0, 0), (0, 1, 0, 1, 0), (0, 2, 0, 2, 0), (0, 3, 0, 3, 0),
    (1, 0, 0, 1, 0), (1, 1, 0, 2, 0), (1, 2, 0, 3, 0), (1, 3, 0, 0, 1),
    (2, 0, 0, 2, 0), (2, 1, 0, 3, 0), (2, 2, 0, 0, 1), (2, 3, 0, 1, 1),
    (3, 0, 0, 3, 0), (3, 1, 0, 0, 1), (3, 2, 0, 1, 1), (3, 3, 0, 3, 1),
]
ADDER_TABLE_RIGHT = [
    (0, 0, 1, 1, 0), (0, 1, 1, 2, 0), (0, 2, 1, 3, 0), (0, 3, 1, 0, 1),
    (1, 0, 1, 2, 0), (1, 1, 1, 3, 0), (1, 2, 1, 0, 1), (1, 3, 1, 1, 1),
    (2, 0, 1, 3, 0), (2, 1, 1, 0, 1), (2, 2, 1, 1, 1), (2, 3, 0, 2, 1),
    (3, 0, 1, 0, 1), (3, 1, 1, 1, 1), (3, 2, 1, 2, 1), (3, 3, 1, 3, 1),
]
ADDER_TABLE = ADDER_TABLE_LEFT + ADDER_TABLE_RIGHT

# rows that disagree with arithmetic: (half, index in half)
ADDER_TABLE_ERRATA = {("left", 15), ("right", 11)}
