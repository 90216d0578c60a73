"""Bit-hop accounting for memory-assisted compression on a network.

Traffic cost is bits times hops. Without memory a packet crosses the
shortest server-client path compressed at the plain universal rate. With a
memory node ``M``, the server-to-``M`` leg is coded with side information
(``g`` times shorter) and ``M`` re-encodes for the ``M``-to-client leg.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

ROLES = ("server", "memory", "client", "relay")
BITS_PER_KB = 8 * 1024


class DisconnectedError(ValueError):
    pass


@dataclass(frozen=True)
class Network:
    """Undirected unit-hop graph with a role tag per node."""

    roles: dict[str, str]
    adjacency: dict[str, frozenset[str]] = field(repr=False)

    @classmethod
    def from_edges(cls, roles: dict[str, str], edges) -> "Network":
        roles = dict(roles)
        for node, role in roles.items():
            if role not in ROLES:
                raise ValueError(f"node {node!r} has unknown role {role!r}")
        adj: dict[str, set[str]] = {node: set() for node in roles}
        for edge in edges:
            if len(edge) == 3:
                if edge[2] != 1:
                    raise ValueError("weighted edges are not supported; every edge is one hop")
            elif len(edge) != 2:
                raise ValueError(f"malformed edge {edge!r}")
            a, b = edge[0], edge[1]
            for node in (a, b):
                if node not in adj:
                    raise ValueError(f"edge {edge!r} references unknown node {node!r}")
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            adj[a].add(b)
            adj[b].add(a)
        return cls(roles, {k: frozenset(v) for k, v in adj.items()})

    @classmethod
    def from_dict(cls, obj: dict) -> "Network":
        roles = {}
        for node in obj["nodes"]:
            if node["id"] in roles:
                raise ValueError(f"duplicate node id {node['id']!r}")
            roles[node["id"]] = node.get("role", "relay")
        return cls.from_edges(roles, obj["edges"])

    @classmethod
    def load(cls, path) -> "Network":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        edges = sorted({tuple(sorted((a, b))) for a, nbrs in self.adjacency.items() for b in nbrs})
        return {"nodes": [{"id": n, "role": r} for n, r in self.roles.items()],
                "edges": [list(e) for e in edges]}

    def nodes_with_role(self, role: str) -> list[str]:
        return sorted(n for n, r in self.roles.items() if r == role)

    def _only(self, role: str) -> str:
        found = self.nodes_with_role(role)
        if len(found) != 1:
            raise ValueError(f"expected exactly one {role} node, found {found}")
        return found[0]

    @property
    def server(self) -> str:
        return self._only("server")

    @property
    def client(self) -> str:
        return self._only("client")


def fig5_network() -> Network:
    """The bundled sample network: one server, five relays, one memory node, one client."""
    text = resources.files("sidecomp").joinpath("data/fig5.json").read_text()
    return Network.from_dict(json.loads(text))


def _bfs(net: Network, source: str) -> dict[str, str | None]:
    if source not in net.adjacency:
        raise KeyError(f"unknown node {source!r}")
    parent: dict[str, str | None] = {source: None}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in sorted(net.adjacency[u]):
            if v not in parent:
                parent[v] = u
                queue.append(v)
    return parent


def shortest_path(net: Network, a: str, b: str) -> list[str]:
    """A fewest-hop path from ``a`` to ``b``, neighbours explored in id order."""
    parent = _bfs(net, a)
    if b not in parent:
        if b not in net.adjacency:
            raise KeyError(f"unknown node {b!r}")
        raise DisconnectedError(f"no path between {a!r} and {b!r}")
    path = [b]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def shortest_hops(net: Network, a: str, b: str) -> int:
    return len(shortest_path(net, a, b)) - 1


def bit_hop_ucomp(net: Network, server: str, client: str, mean_len_bits: float) -> float:
    """End-to-end universal compression: ``E[l] * d(S, C)``."""
    if mean_len_bits <= 0:
        raise ValueError("mean length must be positive")
    return mean_len_bits * shortest_hops(net, server, client)


def bit_hop_ucomp_ed(net: Network, server: str, memory: str, client: str,
                     mean_len_bits: float, gain_g: float) -> float:
    """``d(S, M) * E[l] / g + d(M, C) * E[l]``."""
    if mean_len_bits <= 0:
        raise ValueError("mean length must be positive")
    if gain_g < 1:
        raise ValueError("side-information gain must be >= 1")
    return (shortest_hops(net, server, memory) * mean_len_bits / gain_g
            + shortest_hops(net, memory, client) * mean_len_bits)


@dataclass(frozen=True)
class BitHopReport:
    bh_ucomp: float
    bh_ucomp_ed: float
    gain_bh: float
    chosen_memory: str
    paths: dict[str, list[str]]

    def to_dict(self) -> dict:
        return asdict(self)


def gain_bh(net: Network, server: str, client: str, g: float, memory_choice: str = "auto",
            mean_len_bits: float = 1.0) -> BitHopReport:
    """Bit-hop gain ``BH_Ucomp / BH_UcompED``.

    ``memory_choice="auto"`` scans every memory-role node and keeps the best,
    breaking ties by the smallest node id. Any node id may be given instead.
    The ratio does not depend on ``mean_len_bits``.
    """
    if server == client:
        raise ValueError("server and client must differ")
    if memory_choice == "auto":
        candidates = net.nodes_with_role("memory")
        if not candidates:
            raise ValueError("no memory nodes in the network")
    else:
        if memory_choice not in net.adjacency:
            raise KeyError(f"unknown node {memory_choice!r}")
        candidates = [memory_choice]
    bh_u = bit_hop_ucomp(net, server, client, mean_len_bits)
    best = None
    for mem in candidates:
        bh_ed = bit_hop_ucomp_ed(net, server, mem, client, mean_len_bits, g)
        if best is None or bh_ed < best[0]:
            best = (bh_ed, mem)
    bh_ed, mem = best
    paths = {"server_client": shortest_path(net, server, client),
             "server_memory": shortest_path(net, server, mem),
             "memory_client": shortest_path(net, mem, client)}
    return BitHopReport(bh_u, bh_ed, bh_u / bh_ed, mem, paths)
