"""Running checks: one at a time or as a concurrent suite."""

from __future__ import annotations

import contextvars
import logging
import time
import traceback
from concurrent.futures import ThreadPoolExecutor

from ..limits import ResourceLimitExceeded, flat_size_limit
from .checks import CheckContext, CheckSpec, CheckTimeout, get_check, select
from .config import HarnessConfig
from .report import CheckReport, jsonable

log = logging.getLogger(__name__)


def run_check(spec: CheckSpec | str, config: HarnessConfig | None = None) -> CheckReport:
    config = config or HarnessConfig()
    if isinstance(spec, str):
        spec = get_check(spec)
    t0 = time.monotonic()
    ctx = CheckContext(spec, config, t0 + config.wall_time)
    status, message = "pass", ""
    try:
        with flat_size_limit(config.max_flat):
            spec.func(ctx)
        if ctx.failures:
            status = "fail"
            message = f"{len(ctx.failures)} of {ctx.counts['checked']} comparisons failed"
    except (ResourceLimitExceeded, CheckTimeout) as exc:
        status, message = "skipped", f"{type(exc).__name__}: {exc}"
    except Exception as exc:
        status, message = "error", f"{type(exc).__name__}: {exc}"
        ctx.failures.append({"what": "exception", "traceback": traceback.format_exc(limit=6)})
    report = CheckReport(
        id=spec.id, status=status, statement=spec.statement,
        measured=jsonable(ctx.measured), tolerances=dict(ctx.tolerances),
        runtime=time.monotonic() - t0, artifacts=list(ctx.artifacts),
        failures=jsonable(ctx.failures[:20]), tags=list(spec.tags), seed=int(config.seed), message=message)
    log.info(report.summary_line())
    return report


def run_suite(filter: str | None = None, config: HarnessConfig | None = None,
              only: list[str] | None = None) -> tuple[list[CheckReport], int]:
    """Run matching checks; the exit code is 0 iff every check passed or was skipped."""
    config = config or HarnessConfig()
    specs = [get_check(i) for i in only] if only else select(filter)
    if config.workers > 1 and len(specs) > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            futures = [pool.submit(contextvars.copy_context().run, run_check, s, config) for s in specs]
            reports = [f.result() for f in futures]
    else:
        reports = [run_check(s, config) for s in specs]
    code = 0 if all(r.status in ("pass", "skipped") for r in reports) else 1
    return reports, code
