"""Synthetic data sets with known archetypes and known weights.

Every observation is an exact convex combination of a few generating
archetypes, and the archetypes themselves appear as observations, so the
generating points are the hull vertices and a fit with the same ``k``
recovers them with zero residual. Weights are kept away from the usual
cohort thresholds (0.8, 0.95) so cohort membership is unambiguous.

Run ``python -m archetypal.fixtures OUT_DIR`` to write the CSV files.
"""

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DataMatrix
from .io import write_csv

__all__ = [
    "NBA_COLUMNS",
    "NBA2D_COLUMNS",
    "SOCCER_COLUMNS",
    "Fixture",
    "nba",
    "nba2d",
    "soccer",
    "triangle",
    "write_fixture",
]

THRESHOLDS = (0.8, 0.95)

NBA2D_COLUMNS = ("Min", "FGM")
NBA_COLUMNS = (
    "GP", "Min", "FGM", "FGA", "3PM", "3PA", "FTM", "FTA", "OReb", "TotReb",
    "Ast", "Stl", "TO", "Blk", "PF", "Dq", "Pts", "Tech", "GS",
)
SOCCER_COLUMNS = (
    "Attack", "Defence", "Balance", "Stamina", "TopSpeed", "Acceleration",
    "Response", "Agility", "DribbleAccuracy", "DribbleSpeed",
    "ShortPassAccuracy", "ShortPassSpeed", "LongPassAccuracy",
    "LongPassSpeed", "ShotAccuracy", "ShotPower", "ShotTechnique",
    "FreeKickAccuracy", "Swerve", "Header", "Jump", "Technique",
    "Aggression", "Mentality", "Teamwork",
)
TEAMS = ("ATL", "BOS", "CHI", "DAL", "DEN", "LAL", "MIA", "OKL", "PHO", "SAC")
CLUBS = ("FC North", "Athletic South", "Real East", "United West", "Sporting Central")


@dataclass(frozen=True, eq=False)
class Fixture:
    """Generated data plus the truth it was generated from.

    ``weights[i]`` are the convex weights of observation ``i`` over the
    rows of ``archetypes``; ``archetype_rows[j]`` is the observation equal
    to archetype ``j``.
    """

    name: str
    data: DataMatrix
    archetypes: np.ndarray
    weights: np.ndarray
    archetype_rows: tuple
    label_column: str
    metadata_columns: tuple


def _weights(rng, n, k, concentration, floor=0.0, margin=0.02):
    out = []
    while len(out) < n:
        w = rng.dirichlet(np.full(k, concentration))
        if w.min() < floor:
            continue
        if any(abs(w - t).min() < margin for t in THRESHOLDS):
            continue
        out.append(w)
    return np.array(out)


def _assemble(name, archetypes, mixed, rng, labels_prefix, label_column, metadata):
    k = archetypes.shape[0]
    weights = np.vstack([np.eye(k), mixed])
    order = rng.permutation(len(weights))
    weights = weights[order]
    values = weights @ archetypes
    archetype_rows = tuple(int(np.flatnonzero(order == j)[0]) for j in range(k))
    labels = tuple(f"{labels_prefix} {i + 1:03d}" for i in range(len(weights)))
    meta = {key: tuple(fn(weights[i], i) for i in range(len(weights))) for key, fn in metadata.items()}
    return weights, values, archetype_rows, labels, meta


def triangle(n_interior=20, seed=0):
    """Vertices (0,0), (1,0), (0,1) plus strictly interior points."""
    rng = np.random.default_rng(seed)
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    mixed = _weights(rng, n_interior, 3, concentration=0.6, floor=0.02)
    weights = np.vstack([np.eye(3), mixed])
    data = DataMatrix(weights @ vertices, ("x", "y"), tuple(f"P{i + 1:02d}" for i in range(len(weights))))
    return Fixture("triangle", data, vertices, weights, (0, 1, 2), "Name", ())


def nba2d(n=60, seed=1):
    """Minutes and field goals made, three scorer types."""
    rng = np.random.default_rng(seed)
    # good scorer, bad scorer, ineffective scorer
    archetypes = np.array([[3234.0, 793.0], [7.0, 0.0], [2713.0, 256.0]])
    mixed = _weights(rng, n - 3, 3, concentration=0.5, floor=0.01)
    roles = ("SF", "C", "PG")
    weights, values, rows, labels, meta = _assemble(
        "nba2d", archetypes, mixed, rng, "Player", "Name",
        {
            "Team": lambda w, i: TEAMS[i % len(TEAMS)],
            "Role": lambda w, i: roles[int(np.argmax(w))],
        },
    )
    data = DataMatrix(values, NBA2D_COLUMNS, labels, meta)
    return Fixture("nba2d", data, archetypes, weights, rows, "Name", ("Team", "Role"))


def _nba_archetypes():
    # benchwarmer, rebounder/defender, three-point shooter, offensive player
    bench = [5, 30, 3, 8, 0, 1, 1, 2, 2, 6, 2, 1, 2, 1, 5, 0, 7, 0, 0]
    rebounder = [80, 2300, 380, 700, 2, 8, 150, 260, 260, 800, 110, 60, 120, 150, 250, 6, 910, 5, 75]
    shooter = [78, 2400, 350, 800, 190, 440, 90, 110, 30, 210, 240, 80, 110, 15, 150, 0, 980, 1, 60]
    offense = [82, 3200, 790, 1650, 130, 350, 750, 850, 70, 620, 230, 110, 260, 80, 150, 1, 2470, 4, 80]
    return np.array([bench, rebounder, shooter, offense], dtype=float)


def nba(n=120, seed=2):
    """Nineteen box-score statistics, four player types."""
    rng = np.random.default_rng(seed)
    archetypes = _nba_archetypes()
    mixed = _weights(rng, n - 4, 4, concentration=0.4)
    roles = ("PG", "C", "SG", "SF")
    weights, values, rows, labels, meta = _assemble(
        "nba", archetypes, mixed, rng, "Player", "Name",
        {
            "Team": lambda w, i: TEAMS[(3 * i) % len(TEAMS)],
            "Role": lambda w, i: roles[int(np.argmax(w))],
        },
    )
    data = DataMatrix(values, NBA_COLUMNS, labels, meta)
    return Fixture("nba", data, archetypes, weights, rows, "Name", ("Team", "Role"))


def _soccer_archetypes():
    offensive = [92, 45, 62, 85, 88, 90, 90, 93, 95, 92, 93, 88, 88, 82, 90, 86, 92, 85, 88, 60, 62, 95, 70, 85, 82]
    forward = [95, 40, 80, 78, 84, 88, 86, 78, 78, 76, 66, 70, 58, 64, 90, 92, 80, 62, 68, 90, 92, 76, 78, 82, 70]
    weak = [52, 50, 66, 84, 82, 82, 58, 70, 54, 62, 55, 58, 50, 56, 48, 56, 50, 46, 50, 55, 60, 52, 60, 56, 60]
    defender = [50, 92, 90, 82, 74, 72, 88, 66, 60, 60, 72, 74, 70, 76, 48, 70, 50, 50, 55, 88, 90, 64, 86, 82, 82]
    return np.array([offensive, forward, weak, defender], dtype=float)


def soccer(n=150, seed=3, n_pairs=16):
    """Twenty-five skill ratings on a 0-100 scale, four player types.

    ``n_pairs`` of the players mix only the offensive and center-forward
    archetypes, which exercises the two-archetype composition query.
    """
    rng = np.random.default_rng(seed)
    archetypes = _soccer_archetypes()
    general = _weights(rng, n - 4 - n_pairs, 4, concentration=0.5)
    # away from 0.5 so the dominant archetype is unambiguous
    avoid = np.array([0.5, *THRESHOLDS, *(1 - t for t in THRESHOLDS)])
    share = []
    while len(share) < n_pairs:
        s = rng.uniform(0.1, 0.9)
        if np.abs(avoid - s).min() >= 0.02:
            share.append(s)
    share = np.array(share)
    pairs = np.zeros((n_pairs, 4))
    pairs[:, 0] = share
    pairs[:, 1] = 1.0 - share
    mixed = np.vstack([general, pairs])
    positions = ("Midfielder", "Forward", "Midfielder", "Defender")
    weights, values, rows, labels, meta = _assemble(
        "soccer", archetypes, mixed, rng, "Footballer", "Name",
        {
            "Club": lambda w, i: CLUBS[i % len(CLUBS)],
            "Position": lambda w, i: positions[int(np.argmax(w))],
        },
    )
    data = DataMatrix(values, SOCCER_COLUMNS, labels, meta)
    return Fixture("soccer", data, archetypes, weights, rows, "Name", ("Club", "Position"))


def write_fixture(fixture, directory):
    """Write ``<name>.csv`` (label, metadata, numeric columns) and ``<name>_weights.csv``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data = fixture.data
    header = [fixture.label_column, *fixture.metadata_columns, *data.column_names]
    rows = [
        [data.label(i), *(data.metadata[c][i] for c in fixture.metadata_columns), *data.values[i]]
        for i in range(data.n)
    ]
    path = directory / f"{fixture.name}.csv"
    write_csv(path, header, rows)
    k = fixture.weights.shape[1]
    write_csv(
        directory / f"{fixture.name}_weights.csv",
        [fixture.label_column, *(f"w{j + 1}" for j in range(k))],
        [[data.label(i), *fixture.weights[i]] for i in range(data.n)],
    )
    return path


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    out = Path(argv[0]) if argv else Path("fixtures")
    for make in (triangle, nba2d, nba, soccer):
        print(write_fixture(make(), out))


if __name__ == "__main__":
    main()
