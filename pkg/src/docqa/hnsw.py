"""In-process approximate nearest-neighbor index (HNSW graph, cosine metric).

Vectors are stored L2-normalized as float32, so cosine similarity is a dot
product. A seeded, serializable RNG drives level assignment, making graph
construction and searches reproducible across runs and platforms. A
brute-force scan with the identical ordering contract serves as the testing
oracle.
"""

from __future__ import annotations

import heapq
import math
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CorruptFile,
    DimensionMismatch,
    DuplicateId,
    EmptyIndex,
    FormatVersionMismatch,
    ZeroVector,
)

FORMAT_VERSION = 1
_MAGIC = b"HNSW"
_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass
class HnswParams:
    M: int = 16
    ef_construction: int = 200
    ef_search: int = 100
    rng_seed: int = 0x5EED1E55

    def __post_init__(self) -> None:
        if self.M < 2:
            raise ValueError("M must be >= 2")
        if self.ef_construction < self.M:
            raise ValueError("ef_construction must be >= M")
        if self.ef_search < 1:
            raise ValueError("ef_search must be >= 1")

    @property
    def M0(self) -> int:
        return 2 * self.M

    @property
    def mL(self) -> float:
        return 1.0 / math.log(self.M)


@dataclass
class SearchHit:
    chunk_id: str
    similarity: float
    rank: int


class _SplitMix64:
    """Tiny deterministic PRNG; its whole state is one u64, which makes the
    index file's RNG snapshot trivial."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def next_unit_open(self) -> float:
        """Uniform draw in the open interval (0, 1)."""
        return ((self.next_u64() >> 11) + 1) / (2.0**53 + 1)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """dot(a, b) / (|a| |b|); raises ZeroVector on zero-norm input."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    return float(np.dot(a, b) / (na * nb))


class HnswIndex:
    """HNSW graph over (chunk_id, vector) entries.

    Hits are ordered by similarity descending with ties broken by chunk_id
    ascending — the same contract the brute-force oracle follows, so with
    ef_search >= index size the two agree exactly.
    """

    def __init__(self, params: HnswParams | None = None):
        self.params = params or HnswParams()
        self._rng = _SplitMix64(self.params.rng_seed)
        self._dim: int | None = None
        self._ids: list[str] = []
        self._id_to_idx: dict[str, int] = {}
        self._levels: list[int] = []
        # _links[node][layer] -> list of neighbor node indices
        self._links: list[list[list[int]]] = []
        self._vectors = np.zeros((0, 0), dtype=np.float32)
        self._count = 0
        self._entry: int | None = None
        self._max_level = -1

    def __len__(self) -> int:
        return self._count

    @property
    def dim(self) -> int | None:
        return self._dim

    @property
    def ids(self) -> list[str]:
        return self._ids[: self._count]

    def vector(self, chunk_id: str) -> np.ndarray:
        idx = self._id_to_idx[chunk_id]
        return np.array(self._vectors[idx], dtype=np.float32)

    # -- construction ------------------------------------------------------

    def _ensure_capacity(self) -> None:
        if self._count < self._vectors.shape[0]:
            return
        new_cap = max(16, self._vectors.shape[0] * 2)
        grown = np.zeros((new_cap, self._dim), dtype=np.float32)
        grown[: self._count] = self._vectors[: self._count]
        self._vectors = grown

    def _draw_level(self) -> int:
        u = self._rng.next_unit_open()
        return int(-math.log(u) * self.params.mL)

    def insert(self, chunk_id: str, vector: np.ndarray) -> None:
        vector = np.asarray(vector, dtype=np.float64).ravel()
        if self._dim is None:
            self._dim = int(vector.shape[0])
            self._vectors = np.zeros((16, self._dim), dtype=np.float32)
        elif vector.shape[0] != self._dim:
            raise DimensionMismatch(
                f"vector has dimension {vector.shape[0]}, index expects {self._dim}"
            )
        if chunk_id in self._id_to_idx:
            raise DuplicateId(f"chunk_id already indexed: {chunk_id}")
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise ZeroVector("cannot index a zero vector")

        level = self._draw_level()
        idx = self._count
        self._ensure_capacity()
        self._vectors[idx] = (vector / norm).astype(np.float32)
        self._ids.append(chunk_id)
        self._id_to_idx[chunk_id] = idx
        self._levels.append(level)
        self._links.append([[] for _ in range(level + 1)])
        self._count += 1

        if self._entry is None:
            self._entry = idx
            self._max_level = level
            return

        query = self._vectors[idx].astype(np.float64)
        entry_points = [self._entry]
        for layer in range(self._max_level, level, -1):
            entry_points = [self._greedy_closest(query, entry_points[0], layer)]

        for layer in range(min(level, self._max_level), -1, -1):
            candidates = self._search_layer(
                query, entry_points, layer, self.params.ef_construction
            )
            cap = self.params.M0 if layer == 0 else self.params.M
            neighbors = [n for _, n in heapq.nlargest(cap, candidates)]
            self._links[idx][layer] = list(neighbors)
            for neighbor in neighbors:
                links = self._links[neighbor][layer]
                links.append(idx)
                if len(links) > cap:
                    self._prune(neighbor, layer, cap)
            entry_points = [n for _, n in sorted(candidates, reverse=True)]

        if level > self._max_level:
            self._entry = idx
            self._max_level = level

    def _prune(self, node: int, layer: int, cap: int) -> None:
        links = self._links[node][layer]
        sims = self._similarities(self._vectors[node].astype(np.float64), links)
        keep = heapq.nlargest(cap, zip(sims, links))
        self._links[node][layer] = [n for _, n in keep]

    # -- search ------------------------------------------------------------

    def _similarities(self, query: np.ndarray, idxs: list[int]) -> list[float]:
        rows = self._vectors[idxs].astype(np.float64)
        # Row-wise multiply-and-reduce: unlike a BLAS matmul, each row's
        # result is identical no matter how the rows are batched, which keeps
        # graph search and the brute-force oracle bit-for-bit comparable.
        return list(map(float, np.sum(rows * query, axis=1)))

    def _greedy_closest(self, query: np.ndarray, start: int, layer: int) -> int:
        current = start
        (current_sim,) = self._similarities(query, [current])
        improved = True
        while improved:
            improved = False
            neighbors = self._links[current][layer]
            if not neighbors:
                break
            sims = self._similarities(query, neighbors)
            best = int(np.argmax(sims))
            if sims[best] > current_sim:
                current = neighbors[best]
                current_sim = sims[best]
                improved = True
        return current

    def _search_layer(
        self, query: np.ndarray, entry_points: list[int], layer: int, ef: int
    ) -> list[tuple[float, int]]:
        """Beam search at one layer; returns up to ef (similarity, idx) pairs."""
        visited = set(entry_points)
        entry_sims = self._similarities(query, list(entry_points))
        # candidates: max-heap on similarity (negated); results: min-heap.
        candidates = [(-s, n) for s, n in zip(entry_sims, entry_points)]
        heapq.heapify(candidates)
        results = list(zip(entry_sims, entry_points))
        heapq.heapify(results)
        while len(results) > ef:
            heapq.heappop(results)

        while candidates:
            neg_sim, node = heapq.heappop(candidates)
            if len(results) >= ef and -neg_sim < results[0][0]:
                break
            fresh = [n for n in self._links[node][layer] if n not in visited]
            if not fresh:
                continue
            visited.update(fresh)
            for sim, neighbor in zip(self._similarities(query, fresh), fresh):
                if len(results) < ef:
                    heapq.heappush(results, (sim, neighbor))
                    heapq.heappush(candidates, (-sim, neighbor))
                elif sim > results[0][0]:
                    heapq.heappushpop(results, (sim, neighbor))
                    heapq.heappush(candidates, (-sim, neighbor))
        return results

    def _finalize(self, scored: list[tuple[float, int]], k: int) -> list[SearchHit]:
        ordered = sorted(scored, key=lambda pair: (-pair[0], self._ids[pair[1]]))[:k]
        return [
            SearchHit(chunk_id=self._ids[idx], similarity=sim, rank=rank)
            for rank, (sim, idx) in enumerate(ordered, start=1)
        ]

    def _prepare_query(self, query: np.ndarray) -> np.ndarray:
        query = np.asarray(query, dtype=np.float64).ravel()
        if self._dim is None or self._count == 0:
            raise EmptyIndex("search requested on an empty index")
        if query.shape[0] != self._dim:
            raise DimensionMismatch(
                f"query has dimension {query.shape[0]}, index expects {self._dim}"
            )
        norm = float(np.linalg.norm(query))
        if norm == 0.0:
            raise ZeroVector("cannot search with a zero vector")
        return query / norm

    def search_knn(self, query: np.ndarray, k: int, ef_search: int | None = None) -> list[SearchHit]:
        query = self._prepare_query(query)
        if k < 1:
            raise ValueError("k must be >= 1")
        ef = max(ef_search if ef_search is not None else self.params.ef_search, k)
        entry = self._entry
        assert entry is not None
        for layer in range(self._max_level, 0, -1):
            entry = self._greedy_closest(query, entry, layer)
        scored = self._search_layer(query, [entry], 0, ef)
        return self._finalize(scored, k)

    def brute_force_knn(self, query: np.ndarray, k: int) -> list[SearchHit]:
        """Exact scan over every stored vector; the oracle for search_knn."""
        query = self._prepare_query(query)
        if k < 1:
            raise ValueError("k must be >= 1")
        sims = self._similarities(query, list(range(self._count)))
        scored = list(zip(sims, range(self._count)))
        return self._finalize(scored, k)

    # -- persistence -------------------------------------------------------

    def save(self, path: str | Path) -> None:
        out = bytearray()
        out += _MAGIC
        out += struct.pack(
            "<IIQIIQ",
            FORMAT_VERSION,
            self._dim or 0,
            self._count,
            self.params.M,
            self.params.M0,
            self.params.rng_seed & _MASK64,
        )
        out += struct.pack(
            "<IIqiQ",
            self.params.ef_construction,
            self.params.ef_search,
            -1 if self._entry is None else self._entry,
            self._max_level,
            self._rng.state,
        )
        for chunk_id in self._ids[: self._count]:
            encoded = chunk_id.encode("utf-8")
            out += struct.pack("<I", len(encoded)) + encoded
        out += self._vectors[: self._count].astype("<f4").tobytes()
        for idx in range(self._count):
            out += struct.pack("<I", self._levels[idx])
            for layer_links in self._links[idx]:
                out += struct.pack("<I", len(layer_links))
                out += struct.pack(f"<{len(layer_links)}I", *layer_links)
        out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
        Path(path).write_bytes(bytes(out))

    @classmethod
    def load(cls, path: str | Path) -> "HnswIndex":
        data = Path(path).read_bytes()
        if len(data) < 8 or data[:4] != _MAGIC:
            raise CorruptFile(f"{path}: not an index file")
        stored_crc = struct.unpack("<I", data[-4:])[0]
        if zlib.crc32(data[:-4]) & 0xFFFFFFFF != stored_crc:
            raise CorruptFile(f"{path}: checksum mismatch")
        offset = 4
        version, dim, count, m, m0, seed = struct.unpack_from("<IIQIIQ", data, offset)
        offset += struct.calcsize("<IIQIIQ")
        if version > FORMAT_VERSION:
            raise FormatVersionMismatch(
                f"{path}: format version {version} is newer than supported {FORMAT_VERSION}"
            )
        ef_construction, ef_search, entry, max_level, rng_state = struct.unpack_from(
            "<IIqiQ", data, offset
        )
        offset += struct.calcsize("<IIqiQ")
        if m0 != 2 * m:
            raise CorruptFile(f"{path}: inconsistent M/M0 header")

        index = cls(HnswParams(M=m, ef_construction=ef_construction, ef_search=ef_search, rng_seed=seed))
        index._rng.state = rng_state
        index._dim = dim if count else None
        index._count = count
        index._entry = None if entry < 0 else entry
        index._max_level = max_level
        try:
            for _ in range(count):
                (length,) = struct.unpack_from("<I", data, offset)
                offset += 4
                index._ids.append(data[offset : offset + length].decode("utf-8"))
                offset += length
            vec_bytes = count * dim * 4
            flat = np.frombuffer(data[offset : offset + vec_bytes], dtype="<f4")
            if flat.size != count * dim:
                raise CorruptFile(f"{path}: truncated vector block")
            index._vectors = flat.reshape(count, dim).copy() if count else np.zeros((0, 0), np.float32)
            offset += vec_bytes
            for _ in range(count):
                (level,) = struct.unpack_from("<I", data, offset)
                offset += 4
                layers = []
                for _ in range(level + 1):
                    (degree,) = struct.unpack_from("<I", data, offset)
                    offset += 4
                    layers.append(list(struct.unpack_from(f"<{degree}I", data, offset)))
                    offset += 4 * degree
                index._levels.append(level)
                index._links.append(layers)
        except struct.error as exc:
            raise CorruptFile(f"{path}: truncated index file") from exc
        index._id_to_idx = {cid: i for i, cid in enumerate(index._ids)}
        return index

    # -- diagnostics -------------------------------------------------------

    def check_well_formed(self) -> None:
        """Raise AssertionError when structural invariants are violated."""
        for idx in range(self._count):
            assert len(self._links[idx]) == self._levels[idx] + 1
            for layer, links in enumerate(self._links[idx]):
                cap = self.params.M0 if layer == 0 else self.params.M
                assert len(links) <= cap, f"node {idx} layer {layer} over cap"
                assert len(set(links)) == len(links), f"node {idx} duplicate links"
                for target in links:
                    assert 0 <= target < self._count, f"dangling link {target}"
                    assert self._levels[target] >= layer, "link above target level"
        if self._count:
            assert self._entry is not None
            seen = {self._entry}
            frontier = [self._entry]
            while frontier:
                node = frontier.pop()
                for target in self._links[node][0]:
                    if target not in seen:
                        seen.add(target)
                        frontier.append(target)
            assert len(seen) == self._count, (
                f"layer-0 reachability broken: {len(seen)}/{self._count}"
            )
