"""
Plain-text and CSV file formats used by RDSim.

Edge lists hold two whitespace-separated node tokens per line; community
files hold a node token followed by its community ids; infection files
hold "token 0|1". Lines starting with '#' are comments everywhere. Tokens
are read as integers when every token of the file is an integer.
"""

import logging
import os
import re
from typing import Dict, Hashable, List, Sequence

import numpy as np
import pandas as pd

from ..core.errors import GraphError, ProtocolError
from ..core.graph import CommunityPartition, Network, build_network
from ..core.infection import InfectionAssignment
from ..core.rds import EXHAUSTED, OUTCOME_COLUMNS, RdsOutcome

logger = logging.getLogger("rdsim")

FLOAT_FORMAT = "%.10g"

_INT_TOKEN = re.compile(r"^-?\d+$")


def _read_rows(path: str) -> List[List[str]]:
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append(line.split())
    return rows


def _typed(tokens: Sequence[str]) -> List[Hashable]:
    if all(_INT_TOKEN.match(t) for t in tokens):
        return [int(t) for t in tokens]
    return list(tokens)


def _label_index(net: Network) -> Dict[str, int]:
    return {str(net.label(v)): v for v in range(net.node_count)}


def read_edge_list(path: str) -> Network:
    """
    Read an undirected edge list into a canonical network.

    Raises:
        GraphError: If a line has fewer than two tokens or no edge survives
    """
    rows = _read_rows(path)
    if any(len(row) < 2 for row in rows):
        raise GraphError(f"{path}: every edge line needs two node tokens")
    tokens = _typed([row[0] for row in rows] + [row[1] for row in rows])
    half = len(rows)
    net = build_network(zip(tokens[:half], tokens[half:]), info={"source": os.path.basename(path)})
    logger.info(f"Read {path}: {net.node_count} nodes, {net.edge_count} edges")
    return net


def write_edge_list(net: Network, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# {net.node_count} nodes {net.edge_count} edges\n")
        for u, v in net.edges():
            f.write(f"{net.label(u)} {net.label(v)}\n")


def read_communities(path: str, net: Network) -> CommunityPartition:
    """
    Read community labels for every node of ``net``.

    Community ids are remapped densely in sorted order.

    Raises:
        GraphError: On unknown node tokens, duplicate lines or nodes without labels
    """
    index = _label_index(net)
    memberships: List[List[Hashable]] = [[] for _ in range(net.node_count)]
    seen = set()
    for row in _read_rows(path):
        if len(row) < 2:
            raise GraphError(f"{path}: node {row[0]} has no community id")
        token = row[0]
        if token not in index:
            raise GraphError(f"{path}: unknown node token {token}")
        if token in seen:
            raise GraphError(f"{path}: node {token} listed twice")
        seen.add(token)
        memberships[index[token]] = row[1:]
    missing = [net.label(v) for v in range(net.node_count) if not memberships[v]]
    if missing:
        raise GraphError(f"{path}: {len(missing)} nodes have no community, e.g. {missing[0]}")

    raw = {c for m in memberships for c in m}
    typed = dict(zip(raw, _typed(list(raw))))
    cid = {c: i for i, c in enumerate(sorted(raw, key=typed.get))}
    part = CommunityPartition.from_memberships([[cid[c] for c in m] for m in memberships])
    logger.info(f"Read {part.community_count} communities from {path}")
    return part


def write_communities(net: Network, part: CommunityPartition, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for v in range(net.node_count):
            ids = " ".join(str(c) for c in sorted(part.memberships[v]))
            f.write(f"{net.label(v)} {ids}\n")


def read_infection(path: str, net: Network) -> InfectionAssignment:
    """Read a "token 0|1" label file covering every node of ``net``."""
    index = _label_index(net)
    mask = np.zeros(net.node_count, dtype=bool)
    seen = np.zeros(net.node_count, dtype=bool)
    for row in _read_rows(path):
        if len(row) != 2 or row[1] not in ("0", "1"):
            raise ProtocolError(f"{path}: expected 'token 0|1', got {' '.join(row)!r}")
        if row[0] not in index:
            raise ProtocolError(f"{path}: unknown node token {row[0]}")
        v = index[row[0]]
        seen[v] = True
        mask[v] = row[1] == "1"
    if not seen.all():
        raise ProtocolError(f"{path}: {int((~seen).sum())} nodes have no infection label")
    return InfectionAssignment.from_mask(mask, protocol="file")


def write_infection(net: Network, inf: InfectionAssignment, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for v in range(net.node_count):
            f.write(f"{net.label(v)} {int(inf.infected[v])}\n")


def write_outcome(out: RdsOutcome, path: str) -> None:
    """Write participants as CSV with header node,recruiter,tree,wave,time (dense node ids)."""
    out.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)


def read_outcome(path: str) -> RdsOutcome:
    frame = pd.read_csv(path, dtype={"recruiter": "Int64"})
    if list(frame.columns) != OUTCOME_COLUMNS:
        raise GraphError(f"{path}: expected header {','.join(OUTCOME_COLUMNS)}")
    return RdsOutcome.from_frame(frame, termination=EXHAUSTED)


def write_frame(frame: pd.DataFrame, path: str) -> None:
    """CSV with 10 significant digits for every float column."""
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
