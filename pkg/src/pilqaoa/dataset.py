"""MaxCut-Sandbox dataset cells, grid expansion and on-disk manifests."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigurationError
from .graphs import generate_complete, generate_random, generate_regular, read_graph, write_graph
from .oracle import max_cut_bruteforce
from .seeding import derive_seed

logger = logging.getLogger(__name__)

FAMILIES = ("random", "regular", "complete")
RNG_NAME = "numpy PCG64, seeds derived with numpy SeedSequence"

NODE_COUNTS = [5, 6, 7, 8, 9, 10]

# the MaxCut-Sandbox grid; odd n*d cells are skipped during expansion
SANDBOX_GRID = {
    "families": [
        {"family": "random", "n": NODE_COUNTS, "ep": [0.2, 0.4, 0.6, 0.8], "weighted": [False, True]},
        {"family": "regular", "n": NODE_COUNTS, "d": [2, 3, 4], "weighted": [False, True]},
        {"family": "complete", "n": NODE_COUNTS, "weighted": [False, True]},
    ]
}


@dataclass(frozen=True)
class DatasetSpec:
    family: str
    n: int
    weighted: bool = False
    seed: int = 0
    ep: float = None
    d: int = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}")
        if (self.ep is not None) != (self.family == "random"):
            raise ConfigurationError("ep must be given for random graphs and only for them")
        if (self.d is not None) != (self.family == "regular"):
            raise ConfigurationError("d must be given for regular graphs and only for them")
        if self.family == "regular" and (self.n * self.d) % 2:
            raise ConfigurationError(f"n*d must be even (n={self.n}, d={self.d})")

    @property
    def instance_id(self):
        return instance_id(self.family, self.n, self.weighted, ep=self.ep, d=self.d)

    @property
    def ep_or_d(self):
        if self.family == "random":
            return self.ep
        if self.family == "regular":
            return self.d
        return ""

    def generate(self):
        if self.family == "random":
            return generate_random(self.n, self.ep, self.weighted, self.seed)
        if self.family == "regular":
            return generate_regular(self.n, self.d, self.weighted, self.seed)
        return generate_complete(self.n, self.weighted, self.seed)

    def to_dict(self):
        d = {"family": self.family, "n": self.n, "weighted": self.weighted, "seed": self.seed}
        if self.ep is not None:
            d["ep"] = self.ep
        if self.d is not None:
            d["d"] = self.d
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            family=d["family"],
            n=int(d["n"]),
            weighted=bool(d.get("weighted", False)),
            seed=int(d.get("seed", 0)),
            ep=d.get("ep"),
            d=d.get("d"),
        )


def instance_id(family, n, weighted, ep=None, d=None):
    prefix = "w" if weighted else "u"
    if family == "random":
        return f"{prefix}-ran-n{n}-ep{ep}"
    if family == "regular":
        return f"{prefix}-reg-n{n}-d{d}"
    return f"{prefix}-com-n{n}"


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def expand_grid(grid, seed):
    """Expand a grid description into dataset specs.

    Returns:
        ``(specs, skipped)``; ``skipped`` lists invalid cells with a reason.
        Each cell's seed is derived from ``seed`` and the cell's id, so it does
        not depend on the order cells are listed in.
    """
    specs, skipped = [], []
    for fam in grid.get("families", []):
        family = fam["family"]
        if family not in FAMILIES:
            raise ConfigurationError(f"unknown family {family!r}")
        extra = {"random": "ep", "regular": "d"}.get(family)
        values = _as_list(fam[extra]) if extra else [None]
        for weighted in _as_list(fam.get("weighted", False)):
            for x in values:
                for n in _as_list(fam["n"]):
                    kw = {extra: x} if extra else {}
                    iid = instance_id(family, n, bool(weighted), **kw)
                    if family == "regular" and ((n * x) % 2 or x >= n):
                        reason = "n*d odd" if (n * x) % 2 else "d >= n"
                        logger.warning("skipping %s: %s", iid, reason)
                        skipped.append({"id": iid, "family": family, "n": n, "d": x,
                                        "weighted": bool(weighted), "reason": reason})
                        continue
                    specs.append(DatasetSpec(family, int(n), bool(weighted), derive_seed(seed, iid), **kw))
    return specs, skipped


def gen_dataset(grid, out_dir, seed=0):
    """Write one graph file per valid cell plus ``manifest.json``.

    The optimal cut of every graph is computed eagerly and recorded.
    """
    out = Path(out_dir)
    (out / "graphs").mkdir(parents=True, exist_ok=True)
    specs, skipped = expand_grid(grid, seed)
    instances = []
    for spec in specs:
        g = spec.generate()
        rel = f"graphs/{spec.instance_id}.txt"
        write_graph(out / rel, g)
        opt = max_cut_bruteforce(g)
        instances.append({
            "id": spec.instance_id,
            "file": rel,
            "spec": spec.to_dict(),
            "seed": spec.seed,
            "graph_hash": g.digest,
            "num_edges": g.num_edges,
            "c_star": opt.c_star,
            "witness": opt.witness,
        })
    manifest = {"seed": seed, "rng": RNG_NAME, "instances": instances, "skipped": skipped}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def load_manifest(path):
    """Read a manifest; returns ``[(spec, graph, c_star), ...]``.

    Graph files are checked against the recorded hash.
    """
    path = Path(path)
    manifest = json.loads(path.read_text())
    loaded = []
    for entry in manifest["instances"]:
        g = read_graph(path.parent / entry["file"])
        if g.digest != entry["graph_hash"]:
            raise ConfigurationError(f"{entry['file']}: hash mismatch with manifest")
        loaded.append((DatasetSpec.from_dict(entry["spec"]), g, entry.get("c_star")))
    return loaded
