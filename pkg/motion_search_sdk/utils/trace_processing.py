"""
Utility functions for search trace processing.
"""
import json
from typing import TYPE_CHECKING

from motion_search_sdk.models.report import LAWS

if TYPE_CHECKING:
    from motion_search_sdk.core.pipeline import SearchTrace

TRACE_LEVELS = ("none", "minimal", "standard", "detailed", "raw")


def process_search_trace(trace: "SearchTrace", trace_level: str) -> None:
    """
    Display a search trace

    Args:
        trace: The trace of a finished (or failed) run
        trace_level: The trace level (none, minimal, standard, detailed, raw)
    """
    if trace_level == "none" or trace is None:
        return

    if trace_level == "raw":
        print("\n" + "=" * 80)
        print("[SEARCH TRACE] RAW TRACE DATA:")
        print("-" * 80)
        print(json.dumps(trace.model_dump(mode="json"), indent=2))
        print("=" * 80)
        return

    if trace.plan is not None:
        print("\n" + "=" * 80)
        print(f"[SEARCH TRACE] Plan: {len(trace.plan.sub_instructions)} sub-instruction(s), "
              f"{trace.plan.total_plan_frames} frames")
        print("-" * 80)
        for sub in trace.plan.sub_instructions:
            print(f"  {sub.index}. {sub.text} ({sub.frame_budget} frames, moving {', '.join(sub.moving_ids)})")
        print("=" * 80)

    for sub in trace.sub_instructions:
        flag = " [BELOW THRESHOLD]" if sub.below_threshold else ""
        print(f"\n[SEARCH TRACE] Sub-instruction {sub.sub_index}: selected candidate {sub.selected_index} "
              f"with combined score {sub.selected_score:.3f}{flag}")

        if trace_level not in ("standard", "detailed"):
            continue
        for record in sub.rounds:
            print("-" * 80)
            print(f"[SEARCH TRACE] Round {record.round}: drew {record.drawn}, "
                  f"verified {len(record.reports)}, best {record.best_score:.3f}"
                  f"{' (accepted)' if record.accepted else ''}")
            if record.filtered_out:
                print(f"[SEARCH TRACE] Dropped as near-duplicates: {record.filtered_out}")
            if record.resample_reason:
                print(f"[SEARCH TRACE] Resampling: {record.resample_reason}")

            # Per-candidate scores only at the detailed level
            if trace_level == "detailed":
                for report in record.reports:
                    laws = report.law_scores()
                    law_text = ", ".join(f"{law} {laws[law]:.2f}" for law in LAWS)
                    print(f"  - candidate {report.candidate_index}: combined {report.combined:.3f}, "
                          f"semantic {report.semantic.score:.2f}, {law_text}")
                    if report.semantic.explanation:
                        print(f"    {report.semantic.explanation}")
        print("-" * 80)

    if not trace.completed:
        print("\n[SEARCH TRACE] Run did not complete; the trace above is partial")
