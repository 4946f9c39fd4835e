"""HTTP surface: the approval gateway plus a scenario-run endpoint.

Endpoints:

- ``GET /pending`` — pending high-risk decisions awaiting a human verdict
- ``POST /decisions/{token}`` — apply a verdict (404 unknown, 409 already
  resolved, 410 expired)
- ``GET /runs/{run_id}/log`` — stream a run's audit log lines
- ``POST /runs`` — start a scenario run (builtin or inline document); any
  HITL-gated request it parks stays pending until resolved or timed out

All payloads are JSON, timestamps are integer milliseconds, and there is no
authentication: the approver is a self-reported string that lands in the
audit log.
"""

from __future__ import annotations

import asyncio
import os
from contextlib import asynccontextmanager, suppress
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, ConfigDict, Field

from .audit import FileSink, MemorySink, _eval_to_obj
from .errors import AlreadyResolved, Expired, ScenarioError, UnknownToken
from .hitl import DEFAULT_TIMEOUT_MS, HitlGateway, PendingDecision
from .monitor import Mode
from .simlab import load_scenario, mcp_github_scenario, run_scenario


class LabelModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    src: str
    int_class: str = Field(alias="int")
    age: int
    path: list[str]


class TrustEvalModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    belief_id: str
    label: LabelModel = Field(alias="lambda")
    tau_epi: float
    tau_prov: str
    trust: str
    unverifiable: bool = False


class ActionModel(BaseModel):
    name: str
    args: dict[str, str]
    target: str


class PendingDecisionModel(BaseModel):
    token: str
    run_id: str
    created_ts: int
    deadline_ts: int
    action: ActionModel
    trust_evals: list[TrustEvalModel]
    risk: str


class VerdictRequest(BaseModel):
    verdict: Literal["APPROVE", "DENY"]
    approver: str = Field(min_length=1)


class VerdictAck(BaseModel):
    token: str
    run_id: str
    status: str  # Executed | Denied


class RunRequest(BaseModel):
    builtin: str | None = None
    scenario: dict | None = None
    mode: Literal["aware", "blind"] | None = None
    theta: float | None = None


class RunResponse(BaseModel):
    run_id: str
    outcomes: list[str]
    failures: list[dict]
    pending: list[str]
    log_url: str


def _pending_model(p: PendingDecision) -> PendingDecisionModel:
    return PendingDecisionModel(
        token=p.token,
        run_id=p.run_id,
        created_ts=p.created_ts,
        deadline_ts=p.deadline_ts,
        action=ActionModel(name=p.action_name, args=dict(p.args), target=p.target),
        trust_evals=[TrustEvalModel.model_validate(_eval_to_obj(te)) for te in p.trust_evals],
        risk=p.risk.name,
    )


MODE_BY_NAME = {"aware": Mode.belief_aware, "blind": Mode.belief_blind}


def create_app(
    timeout_ms: int = DEFAULT_TIMEOUT_MS,
    log_dir: str | None = None,
    sweep_interval_s: float | None = None,
) -> FastAPI:
    """Build the service. `log_dir` defaults to $BIP_LOG_DIR or ./logs."""
    log_dir = log_dir or os.environ.get("BIP_LOG_DIR", "./logs")
    if sweep_interval_s is None:
        sweep_interval_s = min(1.0, max(0.02, timeout_ms / 4000))

    gateway = HitlGateway(timeout_ms=timeout_ms)
    runs: dict[str, dict] = {}
    run_counter = {"n": 0}

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(_sweep_loop(gateway, sweep_interval_s))
        yield
        task.cancel()
        with suppress(asyncio.CancelledError):
            await task
        for handle in runs.values():
            if isinstance(handle["sink"], FileSink):
                handle["sink"].close()

    app = FastAPI(title="beliefgate gateway", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.gateway = gateway
    app.state.runs = runs

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/pending", response_model=list[PendingDecisionModel])
    def pending() -> list[PendingDecisionModel]:
        return [_pending_model(p) for p in gateway.list_pending()]

    @app.post("/decisions/{token}", response_model=VerdictAck)
    def decide(token: str, body: VerdictRequest) -> VerdictAck:
        try:
            outcome = gateway.resolve(token, body.verdict, body.approver)
        except UnknownToken as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except AlreadyResolved as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except Expired as exc:
            raise HTTPException(status_code=410, detail=str(exc)) from exc
        run_id = next(
            (rid for rid, h in runs.items() if token in h["tokens"]),
            token.rsplit(":", 1)[0],
        )
        return VerdictAck(token=token, run_id=run_id, status=outcome.status.value)

    @app.get("/runs/{run_id}/log")
    def run_log(run_id: str) -> StreamingResponse:
        handle = runs.get(run_id)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")

        def lines():
            sink = handle["sink"]
            if isinstance(sink, MemorySink):
                for line in sink.lines():
                    yield line + "\n"
            else:
                with open(handle["log_path"], "r", encoding="utf-8") as fh:
                    yield from fh

        return StreamingResponse(lines(), media_type="application/x-ndjson")

    @app.post("/runs", response_model=RunResponse)
    def start_run(body: RunRequest) -> RunResponse:
        if (body.builtin is None) == (body.scenario is None):
            raise HTTPException(
                status_code=422, detail="provide exactly one of 'builtin' or 'scenario'"
            )
        mode = MODE_BY_NAME.get(body.mode) if body.mode else None
        try:
            if body.builtin is not None:
                if body.builtin not in ("mcp-github", "mcp_github"):
                    raise HTTPException(
                        status_code=404, detail=f"unknown builtin {body.builtin!r}"
                    )
                scenario = mcp_github_scenario(mode or Mode.belief_aware)
            else:
                scenario = load_scenario(body.scenario)
        except ScenarioError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

        run_counter["n"] += 1
        run_id = f"{scenario.name}-{(mode or scenario.mode).value}-{run_counter['n']}"
        log_path = os.path.join(log_dir, f"{run_id}.jsonl")
        sink = FileSink(log_path)
        try:
            transcript = run_scenario(
                scenario,
                mode=mode,
                theta=body.theta,
                sink=sink,
                run_id=run_id,
                hitl_listener=gateway.submit_pending,
            )
        except ScenarioError as exc:
            sink.close()
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        runs[run_id] = {
            "run": transcript.run,
            "sink": sink,
            "log_path": log_path,
            "tokens": set(transcript.pending_tokens),
        }
        return RunResponse(
            run_id=run_id,
            outcomes=transcript.outcomes,
            failures=transcript.failures,
            pending=transcript.pending_tokens,
            log_url=f"/runs/{run_id}/log",
        )

    return app


async def _sweep_loop(gateway: HitlGateway, interval_s: float) -> None:
    while True:
        await asyncio.sleep(interval_s)
        await asyncio.to_thread(gateway.sweep_expired)
