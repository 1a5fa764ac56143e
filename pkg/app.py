import argparse
import os

from motion_search_sdk import Client, FewShotPlugin, RunConfig, SearchConfig, SyntheticSceneSpec
from motion_search_sdk.harness.synthetic import cmd_make_synthetic
from motion_search_sdk.models.config import PlannerSelection, VerifierSelection

# Extra in-context examples sent with the remote gravity prompt
GRAVITY_EXAMPLES = [
    "Example: a cup drifts upward off the table with nothing holding it. "
    '{"score": 0.1, "explanation": "unsupported upward motion"}',
]


def main():
    parser = argparse.ArgumentParser(description="Motion Search SDK Example")
    parser.add_argument("--scene", type=str, help="Scene bundle directory (default: a new synthetic scene)")
    parser.add_argument("--prompt", type=str, help="Text prompt (default: the scene's prompt)")
    parser.add_argument("--remote", action="store_true",
                        help="Use the remote planner and verifier (PLANNER_* and VERIFIER_* environment variables)")
    parser.add_argument("--seed", type=int, default=0, help="Scripted planner seed")
    parser.add_argument("--k", type=int, default=5, help="Candidates per round")
    parser.add_argument("--out", type=str, default="output", help="Output directory")
    parser.add_argument("--verbosity", type=str, default="verbose",
                        choices=["quiet", "normal", "verbose", "debug"],
                        help="Verbosity level")
    parser.add_argument("--trace", type=str, default="standard",
                        choices=["none", "minimal", "standard", "detailed", "raw"],
                        help="Search trace level (raw shows the complete trace as JSON)")
    args = parser.parse_args()

    # Create the client with specified options
    client = Client(verbosity=args.verbosity, trace_level=args.trace)
    if args.remote:
        client.add_plugin(FewShotPlugin({"gravity": GRAVITY_EXAMPLES}))

    scene = args.scene
    if scene is None:
        scene = cmd_make_synthetic(SyntheticSceneSpec(seed=args.seed, phases=2), os.path.join(args.out, "scene"))
        print(f"Wrote synthetic scene to {scene}")

    config = RunConfig(
        scene=scene,
        prompt=args.prompt,
        planner=PlannerSelection(kind="remote" if args.remote else "scripted", seed=args.seed),
        verifier=VerifierSelection(kind="remote" if args.remote else "local"),
        search=SearchConfig(k=args.k, tau=0.6, max_rounds=3),
        output_dir=args.out,
        write_gif=True,
    )
    result = client.run(config)

    print("\nSelected trajectories:")
    print("-" * 50)
    for sub, report in zip(result.pipeline.plan.sub_instructions, result.pipeline.reports):
        worst = report.worst_law()
        print(f"  {sub.index}. {sub.text}: combined {report.combined:.3f} "
              f"(semantic {report.semantic.score:.2f}, worst law {worst.law} {worst.score:.2f})")
    print("-" * 50)
    if result.pipeline.below_threshold:
        print("At least one phase stayed below tau; the outputs are best effort.")
    print(f"\nTrack file: {result.track_path}")
    print(f"Sketch previews: {os.path.join(result.run_dir, 'selected')}")


if __name__ == "__main__":
    main()
