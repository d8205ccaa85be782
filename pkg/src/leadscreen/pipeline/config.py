from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from leadscreen.clients import ClientConfig
from leadscreen.errors import ConfigError
from leadscreen.pool import DEFAULT_EPSILON
from leadscreen.rules import PROFILES

STAGES = (
    "extract",
    "ingest",
    "predict",
    "flag",
    "refine-apply",
    "filter",
    "select",
    "report",
    "structure-manifest",
    "structure-ingest",
)


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a run needs. Relative paths are resolved against ``base_dir``."""

    base_dir: Path
    gene: str | None = None
    drug: str | None = None
    disease: str | None = None
    profile: str = "main"
    rounds: int = 2
    epsilon: float = DEFAULT_EPSILON
    qed_thresholds: tuple[float, ...] = (0.6,)
    batch_size: int = 50
    seeds: Path | None = None
    generator: str | None = None
    refiner: str | None = None
    structure_tool: str | None = None
    structure_results: Path | None = None
    workdir: Path = Path("leadscreen-run")
    pool: Path | None = None
    stages: dict[str, bool] = field(default_factory=dict)
    clients: ClientConfig | None = None

    def __post_init__(self) -> None:
        if self.profile not in PROFILES:
            raise ConfigError(f"unknown selection profile {self.profile!r}; known: {', '.join(sorted(PROFILES))}")
        if self.rounds < 0:
            raise ConfigError("rounds must be >= 0")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        unknown = set(self.stages) - set(STAGES)
        if unknown:
            raise ConfigError(f"unknown stage toggles: {sorted(unknown)}")
        if self.seeds is not None and not self.seeds.is_file():
            raise ConfigError(f"seed file {self.seeds} does not exist")

    @property
    def pool_path(self) -> Path:
        return self.pool or self.workdir / "pool.jsonl"

    def enabled(self, stage: str) -> bool:
        return self.stages.get(stage, True)

    def with_overrides(self, **kw: Any) -> "PipelineConfig":
        """Copy with every non-None keyword applied (command-line flags win over the file)."""
        kw = {k: v for k, v in kw.items() if v is not None}
        client_kw = {k: kw.pop(k) for k in ("mode", "fixtures") if k in kw}
        cfg = replace(self, **kw)
        if client_kw:
            base = cfg.clients or ClientConfig(mode="replay", fixtures=client_kw.get("fixtures"))
            if "fixtures" in client_kw:
                client_kw["fixtures"] = str(client_kw["fixtures"])
            try:
                cfg = replace(cfg, clients=base.with_overrides(**client_kw))
            except TypeError as exc:
                raise ConfigError(str(exc)) from exc
        return cfg


def _path(base: Path, value: Any) -> Path | None:
    if value in (None, ""):
        return None
    p = Path(str(value)).expanduser()
    return p if p.is_absolute() else base / p


def load_config(path: str | Path | None, cwd: Path | None = None) -> PipelineConfig:
    """Read a YAML config; ``None`` gives defaults rooted at ``cwd``."""
    cwd = cwd or Path.cwd()
    if path is None:
        return PipelineConfig(base_dir=cwd, workdir=cwd / "leadscreen-run")
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping at the top level")
    base = path.resolve().parent
    target = raw.get("target") or {}
    adapters = raw.get("adapters") or {}
    client_raw = dict(raw.get("clients") or {})
    if client_raw.get("fixtures"):
        client_raw["fixtures"] = str(_path(base, client_raw["fixtures"]))
    known = {
        "target", "profile", "rounds", "epsilon", "qed_thresholds", "batch_size", "seeds",
        "adapters", "structure_results", "workdir", "pool", "stages", "clients",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        clients = ClientConfig.from_mapping(client_raw) if client_raw else None
        return PipelineConfig(
            base_dir=base,
            gene=target.get("gene"),
            drug=target.get("drug"),
            disease=target.get("disease"),
            profile=str(raw.get("profile", "main")),
            rounds=int(raw.get("rounds", 2)),
            epsilon=float(raw.get("epsilon", DEFAULT_EPSILON)),
            qed_thresholds=tuple(float(x) for x in raw.get("qed_thresholds", (0.6,))),
            batch_size=int(raw.get("batch_size", 50)),
            seeds=_path(base, raw.get("seeds")),
            generator=adapters.get("generator"),
            refiner=adapters.get("refiner"),
            structure_tool=adapters.get("structure"),
            structure_results=_path(base, raw.get("structure_results")),
            workdir=_path(base, raw.get("workdir")) or base / "leadscreen-run",
            pool=_path(base, raw.get("pool")),
            stages={str(k): bool(v) for k, v in (raw.get("stages") or {}).items()},
            clients=clients,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value in config {path}: {exc}") from exc
