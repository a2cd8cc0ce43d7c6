"""
Scenario files and the pipeline runner behind `scenario run`.

A scenario is a JSON document validated by ScenarioConfig. The working state
is a Wigner function; each pipeline step transforms it or emits artifacts.
An evolve step without an explicit `t` walks through outputs.snapshot_times
and writes one snapshot per time.
"""

import json
import logging
import time
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from . import __version__
from .analysis import phase_space_stats
from .errors import ConfigError, PhaseSpaceError, PipelineError
from .fieldio import write_field, write_outcomes
from .grid import Grid1D, make_balanced_grid, make_grid
from .lindblad import EvolutionSpec, evolve_composed, evolve_trajectory
from .povm import povm_channel, povm_smooth_wigner, sample_povm_outcomes
from .render import render_heatmap
from .states import StateSpec, build_state, density_from_pure
from .transforms import (
    WignerFunction,
    characteristic_from_wigner,
    density_from_wigner,
    husimi_from_density,
    wigner_from_density,
)

logger = logging.getLogger(__name__)

BUILTIN_DIR = Path(__file__).resolve().parent.parent / "scenarios"


class GridConfig(BaseModel):
    """half_width omitted: balanced grid (Wigner momentum lattice equal to the position lattice)"""

    n: int = Field(512, ge=8)
    half_width: Optional[float] = Field(None, gt=0)

    def build(self) -> Grid1D:
        if self.half_width is None:
            return make_balanced_grid(self.n)
        return make_grid(self.n, self.half_width)


class EvolveStep(BaseModel):
    op: Literal["evolve"]
    mode: Literal["position_decoherence", "phase_space_decoherence"]
    gamma: float = Field(ge=0)
    omega: float = Field(0.0, ge=0)
    mass: float = Field(1.0, gt=0)
    n_steps: int = Field(64, ge=1)
    t: Optional[float] = Field(None, ge=0)
    check_steps: bool = True


class PovmApplyStep(BaseModel):
    op: Literal["povm_apply"]
    m: int = Field(1, ge=1)
    sigma: float = Field(1.0, gt=0)


class PovmSmoothStep(BaseModel):
    op: Literal["povm_smooth"]
    m: float = Field(1.0, ge=0)
    sigma: float = Field(1.0, gt=0)


class PovmSampleStep(BaseModel):
    op: Literal["povm_sample"]
    n_samples: int = Field(1000, ge=1)
    sigma: float = Field(1.0, gt=0)


class TransformStep(BaseModel):
    op: Literal["transform"]
    target: Literal["husimi", "characteristic"]
    sigma: float = Field(1.0, gt=0)


class AnalyzeStep(BaseModel):
    op: Literal["analyze"]


PipelineStep = Annotated[
    Union[EvolveStep, PovmApplyStep, PovmSmoothStep, PovmSampleStep, TransformStep, AnalyzeStep],
    Field(discriminator="op"),
]


class OutputConfig(BaseModel):
    directory: Optional[str] = None
    formats: List[Literal["csv", "png", "json"]] = ["csv", "png", "json"]
    colormap: Optional[str] = None
    snapshot_times: List[float] = [0.0]

    @field_validator("snapshot_times")
    @classmethod
    def _sorted(cls, v: List[float]) -> List[float]:
        if any(t < 0 for t in v):
            raise ValueError("snapshot times must be non-negative")
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("snapshot times must be sorted ascending")
        return v


class ScenarioConfig(BaseModel):
    name: str
    description: str = ""
    seed: int = 0
    grid: GridConfig = GridConfig()
    initial_state: StateSpec
    pipeline: List[PipelineStep]
    outputs: OutputConfig = OutputConfig()

    @field_validator("pipeline")
    @classmethod
    def _nonempty(cls, v):
        if not v:
            raise ValueError("pipeline must contain at least one step")
        return v


class Artifact(BaseModel):
    path: str
    kind: str
    step: Optional[int] = None
    time: Optional[float] = None


def _format_validation(e: ValidationError) -> ConfigError:
    first = e.errors()[0]
    field = ".".join(str(part) for part in first["loc"])
    return ConfigError(first["msg"], field=field or None)


def parse_scenario(raw: dict) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(raw)
    except ValidationError as e:
        raise _format_validation(e) from e


def list_scenarios() -> List[str]:
    return sorted(p.stem for p in BUILTIN_DIR.glob("*.json"))


def load_scenario(name_or_path: Union[str, Path]) -> ScenarioConfig:
    """Built-in name (see list_scenarios) or path to a JSON scenario file"""
    path = Path(name_or_path)
    if not path.exists():
        builtin = BUILTIN_DIR / f"{name_or_path}.json"
        if not builtin.exists():
            raise ConfigError(f"no scenario file and no built-in named {name_or_path!r}", field="scenario")
        path = builtin
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON ({e.msg} at line {e.lineno})", field=str(path)) from e
    return parse_scenario(raw)


class ScenarioRunner:
    """Executes one scenario and records every artifact it writes"""

    def __init__(self, config: ScenarioConfig, output_dir: Optional[Union[str, Path]] = None):
        self.config = config
        base = output_dir or config.outputs.directory or Path("output") / config.name
        self.output_dir = Path(base)
        self.grid = config.grid.build()
        self.artifacts: List[Artifact] = []
        self._label_counts: dict[str, int] = {}

    def _record(self, path: Path, kind: str, step: Optional[int], t: Optional[float] = None) -> None:
        self.artifacts.append(Artifact(path=path.name, kind=kind, step=step, time=t))

    def _stem(self, label: str) -> str:
        count = self._label_counts.get(label, 0)
        self._label_counts[label] = count + 1
        return label if count == 0 else f"{label}_{count}"

    def emit_wigner(self, w: WignerFunction, label: str, step: Optional[int], t: Optional[float] = None) -> None:
        formats = self.config.outputs.formats
        stem = self._stem(label)
        if "csv" in formats:
            self._record(write_field(w, self.output_dir / f"{stem}.csv"), "wigner_csv", step, t)
        if "png" in formats:
            title = f"{self.config.name}  t={t:.4g}" if t is not None else f"{self.config.name}  {label}"
            png = render_heatmap(w, self.output_dir / f"{stem}.png", self.config.outputs.colormap, title=title)
            self._record(png, "heatmap_png", step, t)
        if "json" in formats:
            self.emit_metrics(w, stem, step, t)

    def emit_metrics(self, w: WignerFunction, stem: str, step: Optional[int], t: Optional[float] = None) -> None:
        metrics = phase_space_stats(w)
        path = self.output_dir / f"{stem}_metrics.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(metrics.model_dump(), indent=2), encoding="utf-8")
        self._record(path, "metrics_json", step, t)

    def _run_step(self, index: int, step, w: WignerFunction) -> WignerFunction:
        if isinstance(step, EvolveStep):
            spec = EvolutionSpec(
                gamma=step.gamma, omega=step.omega, mass=step.mass, mode=step.mode,
                t=step.t or 0.0, n_steps=step.n_steps,
            )
            if step.t is not None:
                w = evolve_composed(w, spec, check_steps=step.check_steps)
                self.emit_wigner(w, f"step{index}_evolved", index, step.t)
                return w
            times = self.config.outputs.snapshot_times
            snapshots = evolve_trajectory(w, spec, times, check_steps=step.check_steps)
            for k, (t, snap) in enumerate(zip(times, snapshots)):
                self.emit_wigner(snap, f"step{index}_snapshot{k:02d}", index, t)
            return snapshots[-1] if snapshots else w
        if isinstance(step, PovmApplyStep):
            rho = povm_channel(density_from_wigner(w), step.m, step.sigma)
            w = wigner_from_density(rho)
            self.emit_wigner(w, f"step{index}_povm_m{step.m}", index)
            return w
        if isinstance(step, PovmSmoothStep):
            w = povm_smooth_wigner(w, step.m, step.sigma)
            self.emit_wigner(w, f"step{index}_smooth", index)
            return w
        if isinstance(step, PovmSampleStep):
            outcomes = sample_povm_outcomes(density_from_wigner(w), step.n_samples, self.config.seed, step.sigma)
            path = write_outcomes(outcomes, self.output_dir / f"{self._stem(f'step{index}_outcomes')}.csv")
            self._record(path, "outcomes_csv", index)
            return w
        if isinstance(step, TransformStep):
            if step.target == "husimi":
                q = husimi_from_density(density_from_wigner(w), step.sigma)
                stem = self._stem(f"step{index}_husimi")
                self._record(write_field(q, self.output_dir / f"{stem}.csv"), "husimi_csv", index)
                if "png" in self.config.outputs.formats:
                    png = render_heatmap(
                        q, self.output_dir / f"{stem}.png", self.config.outputs.colormap, label="Q(x, p)"
                    )
                    self._record(png, "heatmap_png", index)
            else:
                chi = characteristic_from_wigner(w)
                stem = self._stem(f"step{index}_characteristic")
                self._record(write_field(chi, self.output_dir / f"{stem}.csv"), "characteristic_csv", index)
            return w
        if isinstance(step, AnalyzeStep):
            self.emit_metrics(w, self._stem(f"step{index}"), index)
            return w
        raise ConfigError(f"unsupported step {step!r}", field=f"pipeline.{index}")

    def run(self) -> Path:
        cfg = self.config
        logger.info(f"🚀 Scenario {cfg.name}: grid n={self.grid.n} [{self.grid.x_min:.3f}, {self.grid.x_max:.3f})")
        self.output_dir.mkdir(parents=True, exist_ok=True)
        started = time.perf_counter()

        rho0 = density_from_pure(build_state(cfg.initial_state, self.grid))
        w = wigner_from_density(rho0)
        self.emit_wigner(w, "initial", None, 0.0)

        for index, step in enumerate(cfg.pipeline):
            step_started = time.perf_counter()
            logger.info(f"Step {index} ({step.op}) starting")
            try:
                w = self._run_step(index, step, w)
            except PhaseSpaceError as e:
                logger.error(f"❌ Step {index} ({step.op}) failed: {e}")
                raise PipelineError(index, step.op, e) from e
            logger.info(f"Step {index} ({step.op}) finished in {time.perf_counter() - step_started:.2f}s")

        manifest = {
            "scenario": cfg.name,
            "version": __version__,
            "seed": cfg.seed,
            "grid": self.grid.model_dump(),
            "config": cfg.model_dump(mode="json"),
            "runtime_seconds": round(time.perf_counter() - started, 3),
            "artifacts": [a.model_dump() for a in self.artifacts],
        }
        path = self.output_dir / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        logger.info(f"✅ Scenario {cfg.name}: {len(self.artifacts)} artifacts in {self.output_dir}")
        return path


def run_scenario(config: ScenarioConfig, output_dir: Optional[Union[str, Path]] = None) -> Path:
    """Run a validated scenario; returns the manifest path"""
    return ScenarioRunner(config, output_dir).run()
