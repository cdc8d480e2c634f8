"""HTTP job service: submit an instance, poll status, fetch results.

Jobs run asynchronously through a bounded FIFO worker pool (long solves
must not block the HTTP layer), and every state change is persisted as a
JSON file per job so results survive restarts.
"""

from __future__ import annotations

import json
import os
import queue
import threading
import time
import uuid
from contextlib import asynccontextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .analytics import diversity_report
from .decompose import TabuInnerSampler, solve_large
from .exceptions import ParseError, QreadyError
from .io import catalog_lookup, load_catalog, normalize_format, parse_instance
from .tabu import SamplerParams, SampleSet, sample

API_VERSION = "v1"

QUEUED = "queued"
RUNNING = "running"
COMPLETED = "completed"
FAILED = "failed"

_ALLOWED_TRANSITIONS = {QUEUED: {RUNNING}, RUNNING: {COMPLETED, FAILED}}


@dataclass
class ServiceConfig:
    """Service knobs, all overridable via QREADY_* environment variables."""

    data_dir: Path = Path("qready-jobs")
    workers: int = 1
    size_cap_bytes: int = 50_000_000
    size_cap_variables: int = 50_000
    default_time_limit: float = 60.0
    instances_dir: Path | None = None

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        cfg = cls()
        cfg.data_dir = Path(os.environ.get("QREADY_DATA_DIR", str(cfg.data_dir)))
        cfg.workers = int(os.environ.get("QREADY_WORKERS", cfg.workers))
        cfg.size_cap_bytes = int(os.environ.get("QREADY_SIZE_CAP_BYTES", cfg.size_cap_bytes))
        cfg.size_cap_variables = int(
            os.environ.get("QREADY_SIZE_CAP_VARIABLES", cfg.size_cap_variables)
        )
        cfg.default_time_limit = float(
            os.environ.get("QREADY_DEFAULT_TIME_LIMIT", cfg.default_time_limit)
        )
        inst = os.environ.get("QREADY_INSTANCES_DIR")
        if inst:
            cfg.instances_dir = Path(inst)
        return cfg


@dataclass
class JobRecord:
    job_id: str
    state: str = QUEUED
    submitted_at: float = 0.0
    started_at: float | None = None
    finished_at: float | None = None
    params: dict = field(default_factory=dict)
    instance_text: str = ""
    instance_format: str = "qubo"
    decompose: bool = False
    result: dict | None = None
    error: str | None = None

    def public_view(self) -> dict:
        """Status view: the result summary without the sample payload."""
        view = {
            "job_id": self.job_id,
            "state": self.state,
            "submitted_at": self.submitted_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "params": self.params,
        }
        if self.state == COMPLETED and self.result is not None:
            view["result"] = {
                k: v for k, v in self.result.items() if k not in ("samples", "analytics")
            }
        if self.state == FAILED:
            view["error"] = self.error
        return view


class JobStore:
    """Directory of one JSON file per job, written atomically."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._jobs: dict[str, JobRecord] = {}
        for path in sorted(self.data_dir.glob("job-*.json")):
            record = JobRecord(**json.loads(path.read_text()))
            self._jobs[record.job_id] = record

    def jobs_to_recover(self) -> list[JobRecord]:
        """Queued jobs are re-runnable; running jobs were interrupted."""
        recover = []
        with self._lock:
            for record in self._jobs.values():
                if record.state == QUEUED:
                    recover.append(record)
                elif record.state == RUNNING:
                    record.state = FAILED
                    record.error = "interrupted by service restart"
                    record.finished_at = time.time()
                    self._persist(record)
        return sorted(recover, key=lambda r: r.submitted_at)

    def create(self, record: JobRecord) -> None:
        with self._lock:
            self._jobs[record.job_id] = record
            self._persist(record)

    def get(self, job_id: str) -> JobRecord | None:
        with self._lock:
            return self._jobs.get(job_id)

    def transition(self, job_id: str, state: str, **updates) -> JobRecord:
        with self._lock:
            record = self._jobs[job_id]
            if state not in _ALLOWED_TRANSITIONS.get(record.state, set()):
                raise QreadyError(f"illegal transition {record.state} -> {state}")
            record.state = state
            for key, value in updates.items():
                setattr(record, key, value)
            self._persist(record)
            return record

    def _persist(self, record: JobRecord) -> None:
        path = self.data_dir / f"job-{record.job_id}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(asdict(record), indent=2), encoding="utf-8")
        tmp.replace(path)


def _execute_job(record: JobRecord, default_time_limit: float) -> dict:
    q = parse_instance(record.instance_text, normalize_format(record.instance_format))
    overrides = dict(record.params)
    overrides.setdefault("time_limit", default_time_limit)
    decompose = record.decompose
    subsize = overrides.pop("subsize", None)
    params = SamplerParams(**overrides)
    if decompose:
        sset = solve_large(q, params, TabuInnerSampler(), subsize=subsize or 64)
    else:
        sset = sample(q, params)
    return _result_payload(q.sense_of_origin, sset)


def _result_payload(sense: str, sset: SampleSet) -> dict:
    diversity = diversity_report(sset)
    return {
        "schema_version": 1,
        "sense_of_origin": sense,
        "best_energy": sset.best.energy,
        "num_samples": len(sset),
        "first_found_time": sset.first_found_time,
        "end_time": sset.end_time,
        "elite_count": len(diversity.elite),
        "samples": sset.to_dict(),
        "analytics": diversity.to_dict(),
    }


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    store = JobStore(config.data_dir)
    job_queue: queue.Queue[str | None] = queue.Queue()
    workers: list[threading.Thread] = []

    def worker_loop():
        while True:
            job_id = job_queue.get()
            if job_id is None:
                return
            record = store.get(job_id)
            if record is None or record.state != QUEUED:
                continue
            store.transition(job_id, RUNNING, started_at=time.time())
            try:
                result = _execute_job(record, config.default_time_limit)
                store.transition(job_id, COMPLETED, finished_at=time.time(), result=result)
            except Exception as exc:
                store.transition(job_id, FAILED, finished_at=time.time(), error=str(exc))

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        for record in store.jobs_to_recover():
            job_queue.put(record.job_id)
        for _i in range(config.workers):
            th = threading.Thread(target=worker_loop, daemon=True)
            th.start()
            workers.append(th)
        yield
        for _th in workers:
            job_queue.put(None)

    app = FastAPI(title="qready sampling service", version="0.1.0", lifespan=lifespan)
    app.state.config = config
    app.state.store = store

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": message})

    @app.get(f"/{API_VERSION}/health")
    def health():
        return {"status": "ok"}

    @app.post(f"/{API_VERSION}/jobs", status_code=202)
    async def submit(request: Request):
        content_type = request.headers.get("content-type", "application/json")
        body = await request.body()
        if len(body) > config.size_cap_bytes:
            return error(413, f"request body exceeds {config.size_cap_bytes} bytes")

        if content_type.startswith("text/plain"):
            instance_text = body.decode("utf-8", errors="replace")
            fmt = request.query_params.get("format", "qubo")
            params = {}
            decompose = request.query_params.get("decompose", "") == "true"
        else:
            try:
                payload = json.loads(body)
            except json.JSONDecodeError as exc:
                return error(400, f"invalid JSON body: {exc}")
            fmt = payload.get("format", "qubo")
            params = payload.get("params", {})
            decompose = bool(payload.get("decompose", False))
            if "catalog_name" in payload:
                name = payload["catalog_name"]
                entry = catalog_lookup(load_catalog(), name)
                if entry is None:
                    return error(404, f"unknown catalog name {name!r}")
                if config.instances_dir is None:
                    return error(404, f"no instances directory configured for {name!r}")
                for candidate in (config.instances_dir / name, config.instances_dir / f"{name}.txt"):
                    if candidate.exists():
                        instance_text = candidate.read_text()
                        break
                else:
                    return error(404, f"no instance file for {name!r}")
            elif "instance" in payload:
                instance_text = payload["instance"]
                if not isinstance(instance_text, str):
                    return error(400, "'instance' must be a string")
            else:
                return error(400, "body must contain 'instance' or 'catalog_name'")

        try:
            fmt = normalize_format(fmt)
            q = parse_instance(instance_text, fmt)
        except ParseError as exc:
            return error(400, str(exc))
        if q.num_variables > config.size_cap_variables:
            return error(413, f"instance has {q.num_variables} variables, "
                              f"cap is {config.size_cap_variables}")
        if not isinstance(params, dict):
            return error(400, "'params' must be an object")
        try:
            probe = dict(params)
            probe.pop("subsize", None)
            probe.setdefault("time_limit", config.default_time_limit)
            SamplerParams(**probe)
        except (QreadyError, TypeError) as exc:
            return error(400, f"invalid params: {exc}")

        record = JobRecord(
            job_id=uuid.uuid4().hex,
            submitted_at=time.time(),
            params=params,
            instance_text=instance_text,
            instance_format=fmt,
            decompose=decompose,
        )
        store.create(record)
        job_queue.put(record.job_id)
        return {"job_id": record.job_id}

    @app.get(f"/{API_VERSION}/jobs/{{job_id}}")
    def job_status(job_id: str):
        record = store.get(job_id)
        if record is None:
            return error(404, f"unknown job {job_id!r}")
        return record.public_view()

    @app.get(f"/{API_VERSION}/jobs/{{job_id}}/results")
    def job_results(job_id: str):
        record = store.get(job_id)
        if record is None:
            return error(404, f"unknown job {job_id!r}")
        if record.state == FAILED:
            return error(409, f"job failed: {record.error}")
        if record.state != COMPLETED:
            return error(409, f"job is {record.state}; results are not available yet")
        return {"job_id": job_id, **(record.result or {})}

    return app


def run_service(host: str, port: int, config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port, log_level="warning")
