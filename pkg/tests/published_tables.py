"""Reference values transcribed from the published CPI tables.

Keyed by window length (4..21); list position is start - 1. SAR* cells
are kept as the printed strings so their displayed precision is known.
"""

UNIQUENESS = {
    4: "NUNNNNUNUUNNUNUNUU",
    5: "UNUNNUUNNNNNNNNNN",
    6: "UUUUUUUUUUUUUUUU",
    7: "UUUUUNUNUUUUUUU",
    8: "NNNNUUUUNUUNUU",
    9: "UUUUUUUUNUUNU",
    10: "UUUUUUUUUUUU",
    11: "UUUNUNUUUUN",
    12: "UUNUUNUUUU",
    13: "UUUUUUUUU",
    14: "UUUUUUUU",
    15: "UUUUNUU",
    16: "UUUUUU",
    17: "UUUUU",
    18: "UUUU",
    19: "UUU",
    20: "UU",
    21: "U",
}

SAR_STAR = {
    4: ['0.40', '0.43', '1.60', '0.80', '0.30', '0.40', '0.50', '0.50', '0.20', '0.17', '0.50', '2.10', '1.37', '3.10', '0.97', '2.30', '0.67', '0.77'],
    5: ['0.45', '1.60', '1.95', '0.80', '0.40', '0.55', '0.50', '0.70', '0.50', '0.50', '2.10', '2.10', '3.10', '3.10', '2.30', '2.30', '0.85'],
    6: ['1.63', '2.50', '2.10', '1.20', '0.73', '0.58', '0.70', '0.70', '0.85', '2.13', '2.35', '3.34', '3.10', '3.74', '2.30', '2.58'],
    7: ['2.95', '3.40', '2.75', '1.28', '0.75', '0.80', '0.75', '1.00', '2.30', '2.90', '3.35', '3.40', '3.88', '3.85', '3.00'],
    8: ['4.30', '4.70', '3.10', '1.30', '0.98', '0.87', '1.00', '2.67', '3.30', '3.48', '3.40', '4.40', '3.96', '4.17'],
    9: ['5.60', '5.05', '3.10', '1.50', '1.10', '1.08', '2.73', '4.00', '3.60', '3.60', '4.40', '4.40', '4.38'],
    10: ['6.60', '5.23', '3.23', '1.55', '1.26', '2.85', '4.50', '4.12', '3.60', '4.60', '4.49', '4.89'],
    11: ['7.47', '5.28', '3.27', '1.80', '3.10', '4.70', '4.59', '4.30', '4.60', '4.83', '5.10'],
    12: ['7.79', '5.40', '3.60', '3.53', '5.00', '5.20', '4.96', '5.30', '4.99', '5.46'],
    13: ['8.20', '5.83', '5.23', '5.36', '5.58', '5.57', '6.08', '5.81', '5.61'],
    14: ['8.86', '7.33', '6.83', '5.80', '6.09', '6.88', '6.74', '6.45'],
    15: ['10', '8.88', '7.10', '6.20', '7.60', '7.63', '7.37'],
    16: ['10.7', '8.99', '7.50', '7.60', '8.44', '8.50'],
    17: ['11.3', '9.36', '8.87', '8.46', '9.70'],
    18: ['11.3', '10.5', '9.71', '10'],
    19: ['12.3', '11.2', '10.9'],
    20: ['12.5', '11.8'],
    21: ['13.1'],
}


def displayed_tolerance(cell: str) -> float:
    """Half a unit in the last printed digit."""
    decimals = len(cell.split(".")[1]) if "." in cell else 0
    return 0.5 * 10.0 ** -decimals


def cells():
    for length, row in SAR_STAR.items():
        for start, text in enumerate(row, start=1):
            yield length, start, text, UNIQUENESS[length][start - 1]
