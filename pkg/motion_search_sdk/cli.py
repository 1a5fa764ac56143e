"""
Command-line entry point: ``motion-search <subcommand> ...``

Every SDK error maps to its class's exit code; 2 means a run finished with at
least one sub-instruction below tau.
"""
import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from motion_search_sdk.core.client import Client
from motion_search_sdk.core.errors import EXIT_OK, EXIT_UNEXPECTED, ConfigError, MotionSearchError
from motion_search_sdk.harness.ablation import (
    ABLATION_COLUMNS,
    K_SWEEP_COLUMNS,
    STRATEGIES,
    k_sweep,
    verifier_ablation,
    write_csv,
)
from motion_search_sdk.harness.synthetic import cmd_make_synthetic
from motion_search_sdk.models.config import (
    RunConfig,
    SyntheticSceneSpec,
    VerifierSelection,
    load_run_config,
    parse_run_config,
)
from motion_search_sdk.models.track import DEFAULT_TRACK_FPS, DEFAULT_TRACK_FRAMES
from motion_search_sdk.utils.files import write_text
from motion_search_sdk.utils.logging_setup import VERBOSITY_LEVELS, configure_logging
from motion_search_sdk.utils.trace_processing import TRACE_LEVELS

DEFAULT_K_VALUES = "1,2,3,5,8"


class ArgumentParser(argparse.ArgumentParser):
    """Raise ConfigError instead of exiting, so bad arguments get their own exit code"""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}", field="arguments")


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"Expected a comma-separated list of integers, got '{text}'", field="k") from e


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="motion-search", description="Verifier-guided motion planning for video generation")
    parser.add_argument("--verbosity", choices=list(VERBOSITY_LEVELS), default="normal", help="Logging verbosity")
    parser.add_argument("--trace", choices=list(TRACE_LEVELS), default="none", help="Search trace level")
    commands = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    commands.required = True

    run = commands.add_parser("run", help="Plan, search and export one prompt")
    run.add_argument("--config", help="Run config file (JSON or YAML)")
    run.add_argument("--scene", help="Scene bundle directory")
    run.add_argument("--prompt", help="Text prompt (default: the scene manifest's prompt)")
    run.add_argument("--seed", type=int, help="Scripted planner seed")
    run.add_argument("--k", type=int, help="Candidates per round")
    run.add_argument("--tau", type=float, help="Acceptance threshold")
    run.add_argument("--rounds", type=int, help="Maximum sampling rounds")
    run.add_argument("--backend", choices=["scripted", "remote"], help="Planner backend")
    run.add_argument("--verifier", choices=["local", "remote"], help="Verifier backend")
    run.add_argument("--planted", help="Comma-separated scripted variant cycle")
    run.add_argument("--workers", type=int, help="Threads for rendering and verification")
    run.add_argument("--out", help="Output directory")
    run.add_argument("--run-id", help="Run directory name (default: timestamp)")
    run.add_argument("--gif", action="store_true", help="Also write GIF previews of the selected sketches")
    run.add_argument("--generate", action="store_true", help="Hand the track file to the generator")
    run.add_argument("--dry-run", action="store_true", help="Write the generator request instead of sending it")

    synthetic = commands.add_parser("make-synthetic", help="Write a seeded synthetic scene bundle")
    synthetic.add_argument("out", help="Bundle directory to write")
    synthetic.add_argument("--seed", type=int, default=0)
    synthetic.add_argument("--width", type=int, default=256)
    synthetic.add_argument("--height", type=int, default=256)
    synthetic.add_argument("--shape", choices=["square", "circle"], default="square")
    synthetic.add_argument("--obstacles", type=int, default=1)
    synthetic.add_argument("--obstacle-in-goal", action="store_true")
    synthetic.add_argument("--phases", type=int, default=1)
    synthetic.add_argument("--frames", type=int, default=41, help="Total plan frames")

    sweep = commands.add_parser("k-sweep", help="Mean selected score for each K over seeded scenes")
    sweep.add_argument("--k", default=DEFAULT_K_VALUES, help="Comma-separated K values")
    sweep.add_argument("--seeds", type=int, default=200, help="Number of seeds (0..N-1)")
    sweep.add_argument("--out", default="k_sweep.csv", help="CSV output path")

    ablation = commands.add_parser("verifier-ablation", help="Compare selection objectives over seeded scenes")
    ablation.add_argument("--k", type=int, default=5)
    ablation.add_argument("--seeds", type=int, default=200)
    ablation.add_argument("--strategies", default=",".join(STRATEGIES), help="Comma-separated strategies")
    ablation.add_argument("--out", default="verifier_ablation.csv", help="CSV output path")

    verify = commands.add_parser("verify-only", help="Score one candidate file or sketch directory")
    verify.add_argument("input", help="Candidate file or sketch directory")
    verify.add_argument("--scene", required=True, help="Scene bundle directory")
    verify.add_argument("--phase", type=int, default=1, help="Sub-instruction of the scene plan")
    verify.add_argument("--verifier", choices=["local", "remote"], default="local")
    verify.add_argument("--out", help="Report path (default: stdout)")

    export = commands.add_parser("export", help="Rebuild the dense track of a finished run")
    export.add_argument("run_dir", help="Run directory")
    export.add_argument("--frames", type=int, default=DEFAULT_TRACK_FRAMES)
    export.add_argument("--fps", type=float, default=DEFAULT_TRACK_FPS)
    export.add_argument("--out", help="Track file path (default: <run_dir>/track.json)")
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge CLI flags over the config file (or over defaults)"""
    if args.config:
        data: Dict[str, Any] = load_run_config(args.config).model_dump(exclude_none=True)
    elif args.scene:
        data = {"scene": args.scene}
    else:
        raise ConfigError("run needs --config or --scene", field="scene")

    if args.scene:
        data["scene"] = args.scene
    if args.prompt:
        data["prompt"] = args.prompt
    if args.out:
        data["output_dir"] = args.out
    if args.run_id:
        data["run_id"] = args.run_id
    if args.gif:
        data["write_gif"] = True

    planner = data.setdefault("planner", {})
    for key, value in (("kind", args.backend), ("seed", args.seed)):
        if value is not None:
            planner[key] = value
    if args.planted:
        planner["planted"] = [part.strip() for part in args.planted.split(",") if part.strip()]
    if args.verifier:
        data.setdefault("verifier", {})["kind"] = args.verifier

    search = data.setdefault("search", {})
    for key, value in (("k", args.k), ("tau", args.tau), ("max_rounds", args.rounds), ("max_workers", args.workers)):
        if value is not None:
            search[key] = value

    if args.generate or args.dry_run:
        generator = data.setdefault("generator", {})
        generator["enabled"] = True
        generator["dry_run"] = bool(args.dry_run)
    return parse_run_config(data)


def cmd_run(client: Client, args: argparse.Namespace) -> int:
    result = client.run(run_config_from_args(args))
    for sub, report in zip(result.pipeline.plan.sub_instructions, result.pipeline.reports):
        print(f"phase {sub.index}: combined {report.combined:.3f}")
    print(f"outputs: {result.run_dir}")
    return result.exit_code


def cmd_make_synthetic_args(args: argparse.Namespace) -> int:
    try:
        spec = SyntheticSceneSpec(
            width=args.width,
            height=args.height,
            shape=args.shape,
            obstacles=args.obstacles,
            obstacle_in_goal=args.obstacle_in_goal,
            phases=args.phases,
            frame_budget=args.frames,
            seed=args.seed,
        )
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(f"Invalid synthetic scene: {first['msg']}", field=".".join(str(p) for p in first["loc"])) from e
    print(cmd_make_synthetic(spec, args.out))
    return EXIT_OK


def cmd_k_sweep(args: argparse.Namespace) -> int:
    k_values = _int_list(args.k)
    if not k_values:
        raise ConfigError("k-sweep needs at least one K value", field="k")
    rows = k_sweep(k_values, list(range(args.seeds)))
    write_csv(rows, args.out, K_SWEEP_COLUMNS)
    for row in rows:
        print(f"K={row['K']}: mean {row['mean_score']} std {row['std']} ({row['seeds']} seeds)")
    return EXIT_OK


def cmd_verifier_ablation(args: argparse.Namespace) -> int:
    strategies = [part.strip() for part in args.strategies.split(",") if part.strip()]
    rows = verifier_ablation(list(range(args.seeds)), k=args.k, strategies=strategies)
    write_csv(rows, args.out, ABLATION_COLUMNS)
    for row in rows:
        print(f"{row['strategy']}: mean {row['mean_score']} std {row['std']} ({row['seeds']} seeds)")
    return EXIT_OK


def cmd_verify_only(client: Client, args: argparse.Namespace) -> int:
    report = client.verify_only(args.input, args.scene, phase=args.phase,
                                selection=VerifierSelection(kind=args.verifier))
    text = json.dumps(report.model_dump(mode="json"), indent=2)
    if args.out:
        write_text(args.out, text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_export(client: Client, args: argparse.Namespace) -> int:
    print(client.export(args.run_dir, frames=args.frames, fps=args.fps, out=args.out))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its process exit status"""
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbosity)
        if args.command == "make-synthetic":
            return cmd_make_synthetic_args(args)
        if args.command == "k-sweep":
            return cmd_k_sweep(args)
        if args.command == "verifier-ablation":
            return cmd_verifier_ablation(args)

        client = Client(verbosity=args.verbosity, trace_level=args.trace)
        if args.command == "run":
            return cmd_run(client, args)
        if args.command == "verify-only":
            return cmd_verify_only(client, args)
        return cmd_export(client, args)
    except MotionSearchError as e:
        print(f"error ({type(e).__name__}): {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        print(f"unexpected error ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_UNEXPECTED


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
