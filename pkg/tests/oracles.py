"""Hand-computed expected values, frozen before the implementation ran.

Each entry was worked out by hand from the metric definitions (ratios of
confusion counts, Fleiss' observed/chance agreement) and is written as an
exact fraction so the assertions can use tight tolerances.
"""

from __future__ import annotations

# (tp, fp, fn, tn) -> expected metric values and the set of flagged-undefined
# ratio names. Worked examples:
#   (2,1,1,1): accuracy (2+1)/5, precision_pos 2/(2+1), recall_pos 2/(2+1),
#              f1 harmonic mean of 2/3 and 2/3; negatives mirror with 1/2.
#   (5,3,2,10): f1_pos = 2*(5/8)(5/7) / (5/8 + 5/7) = (50/56)/(75/56) = 2/3.
#   (7,2,3,8):  f1_pos = 2*(7/9)(7/10) / (7/9 + 7/10) = (98/90)/(133/90) = 14/19.
CONFUSION_FIXTURES = [
    {
        "counts": (2, 1, 1, 1),
        "expected": {
            "accuracy": 3 / 5,
            "precision_pos": 2 / 3,
            "recall_pos": 2 / 3,
            "f1_pos": 2 / 3,
            "precision_neg": 1 / 2,
            "recall_neg": 1 / 2,
            "f1_neg": 1 / 2,
        },
        "undefined": set(),
    },
    {
        "counts": (0, 0, 0, 4),
        "expected": {
            "accuracy": 1.0,
            "precision_pos": 0.0,
            "recall_pos": 0.0,
            "f1_pos": 0.0,
            "precision_neg": 1.0,
            "recall_neg": 1.0,
            "f1_neg": 1.0,
        },
        "undefined": {"precision_pos", "recall_pos", "f1_pos"},
    },
    {
        "counts": (4, 0, 0, 0),
        "expected": {
            "accuracy": 1.0,
            "precision_pos": 1.0,
            "recall_pos": 1.0,
            "f1_pos": 1.0,
            "precision_neg": 0.0,
            "recall_neg": 0.0,
            "f1_neg": 0.0,
        },
        "undefined": {"precision_neg", "recall_neg", "f1_neg"},
    },
    {
        "counts": (1, 1, 1, 1),
        "expected": {
            "accuracy": 1 / 2,
            "precision_pos": 1 / 2,
            "recall_pos": 1 / 2,
            "f1_pos": 1 / 2,
            "precision_neg": 1 / 2,
            "recall_neg": 1 / 2,
            "f1_neg": 1 / 2,
        },
        "undefined": set(),
    },
    {
        "counts": (3, 1, 0, 0),
        "expected": {
            "accuracy": 3 / 4,
            "precision_pos": 3 / 4,
            "recall_pos": 1.0,
            "f1_pos": 6 / 7,
            "precision_neg": 0.0,
            "recall_neg": 0.0,
            "f1_neg": 0.0,
        },
        "undefined": {"precision_neg", "f1_neg"},
    },
    {
        "counts": (0, 2, 0, 2),
        "expected": {
            "accuracy": 1 / 2,
            "precision_pos": 0.0,
            "recall_pos": 0.0,
            "f1_pos": 0.0,
            "precision_neg": 1.0,
            "recall_neg": 1 / 2,
            "f1_neg": 2 / 3,
        },
        "undefined": {"recall_pos", "f1_pos"},
    },
    {
        "counts": (5, 3, 2, 10),
        "expected": {
            "accuracy": 3 / 4,
            "precision_pos": 5 / 8,
            "recall_pos": 5 / 7,
            "f1_pos": 2 / 3,
            "precision_neg": 5 / 6,
            "recall_neg": 10 / 13,
            "f1_neg": 4 / 5,
        },
        "undefined": set(),
    },
    {
        "counts": (1, 0, 3, 6),
        "expected": {
            "accuracy": 7 / 10,
            "precision_pos": 1.0,
            "recall_pos": 1 / 4,
            "f1_pos": 2 / 5,
            "precision_neg": 2 / 3,
            "recall_neg": 1.0,
            "f1_neg": 4 / 5,
        },
        "undefined": set(),
    },
    {
        "counts": (0, 0, 4, 0),
        "expected": {
            "accuracy": 0.0,
            "precision_pos": 0.0,
            "recall_pos": 0.0,
            "f1_pos": 0.0,
            "precision_neg": 0.0,
            "recall_neg": 0.0,
            "f1_neg": 0.0,
        },
        "undefined": {"precision_pos", "f1_pos", "recall_neg", "f1_neg"},
    },
    {
        "counts": (7, 2, 3, 8),
        "expected": {
            "accuracy": 3 / 4,
            "precision_pos": 7 / 9,
            "recall_pos": 7 / 10,
            "f1_pos": 14 / 19,
            "precision_neg": 8 / 11,
            "recall_neg": 4 / 5,
            "f1_neg": 16 / 21,
        },
        "undefined": set(),
    },
]

# 4 items, 3 raters, binary categories.
# Per-item agreement: rows 1-2 give (9-3)/6 = 1, rows 3-4 give (4+1-3)/6 = 1/3,
# so observed P-bar = (1 + 1 + 1/3 + 1/3)/4 = 2/3. Column marginals are both
# 6/12 = 1/2, so chance P-bar-e = 1/4 + 1/4 = 1/2.
# kappa = (2/3 - 1/2) / (1 - 1/2) = 1/3.
FLEISS_FOUR_ITEM_TABLE = [[3, 0], [0, 3], [2, 1], [1, 2]]
FLEISS_FOUR_ITEM_KAPPA = 1 / 3

# 2 raters, 4 items: two unanimous rows split across the categories and two
# split rows. P-bar = 2/4 = 1/2, marginals 1/2 each so P-bar-e = 1/2,
# kappa = 0 exactly.
FLEISS_ZERO_TABLE = [[2, 0], [0, 2], [1, 1], [1, 1]]

# 91 items, 3 raters, 72 unanimous.
UNANIMOUS_ITEMS = [["y", "y", "y"]] * 72 + [["y", "y", "n"]] * 19
UNANIMOUS_EXPECTED = 72 / 91
