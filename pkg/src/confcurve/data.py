"""Bundled example dataset.

Seven randomized controlled trials of corticosteroids versus usual care
for mortality in hospitalized COVID-19 patients (WHO REACT working group
prospective meta-analysis, JAMA 2020).  Counts are deaths / patients per
arm; effects are analyzed on the log odds ratio scale.
"""

from __future__ import annotations

from .effects import study_from_counts
from .exact import Table2x2

__all__ = ["CORTICOSTEROID_TRIALS", "corticosteroid_studies", "corticosteroid_tables"]

# (name, deaths_steroids, n_steroids, deaths_control, n_control)
CORTICOSTEROID_TRIALS = (
    ("DEXA-COVID 19", 2, 7, 2, 12),
    ("CoDEX", 69, 128, 76, 128),
    ("RECOVERY", 95, 324, 283, 683),
    ("CAPE COVID", 11, 75, 20, 73),
    ("COVID STEROID", 6, 15, 2, 14),
    ("REMAP-CAP", 26, 105, 29, 92),
    ("Steroids-SARI", 13, 24, 13, 23),
)


def corticosteroid_studies():
    """The seven trials as log-OR :class:`~confcurve.effects.Study` objects."""
    return [study_from_counts(name, *counts) for name, *counts in CORTICOSTEROID_TRIALS]


def corticosteroid_tables():
    """The seven trials as 2x2 tables for the exact mid-p path."""
    return [Table2x2.from_counts(*counts) for _, *counts in CORTICOSTEROID_TRIALS]
