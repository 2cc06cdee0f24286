"""Regenerates assets/templates/*.txt and tests/golden/*.golden.

The golden files render every placeholder as a sentinel @@name@@ using plain
string replacement, which keeps them independent of the C++ renderer.
"""
import pathlib
import re
import sys

root = pathlib.Path(__file__).resolve().parents[2]
src = (root / sys.argv[1]).read_text(encoding="utf-8").splitlines(keepends=True)


def block(start_marker, end_marker, start_at=0):
    i = next(k for k in range(start_at, len(src)) if start_marker in src[k])
    j = next(k for k in range(i + 1, len(src)) if end_marker in src[k])
    return i, j


def verbatim_after(line_no):
    i = next(k for k in range(line_no, len(src)) if src[k].startswith("\\begin{verbatim}"))
    j = next(k for k in range(i + 1, len(src)) if src[k].startswith("\\end{verbatim}"))
    return "".join(src[i + 1:j]), j


def section(title):
    return next(k for k, l in enumerate(src) if l.startswith("\\subsection{" + title))


# First-person decision prompt.
s = section("First-Person Decision Prompt")
state, e1 = verbatim_after(s)
traits, e2 = verbatim_after(e1)
constraints, e3 = verbatim_after(e2)
fmt_block, e4 = verbatim_after(e3)
first = (
    "You are a professional poker player aiming to maximize long-term expected value.\n\n"
    "Current game state:\n" + state + "\n"
    "Opponent profile trait definitions:\n" + traits + "\n"
    "You should use profiling information especially when deciding between folding,\n"
    "calling, value betting, or bluffing.\n\n"
    "Action constraints:\n" + constraints + "\n"
    "You must first write a SELF-EXPLANATION, then output a final DECISION.\n\n"
    + fmt_block
    + "All outputs must strictly follow the specified format.\n"
)

# Second-person profiling prompt.
s = section("Second-Person Opponent Profiling Prompt")
fmt2, e1 = verbatim_after(s)
hints, e2 = verbatim_after(e1)
second = (
    "You are analysing a poker opponent based on observed long-term statistics.\n\n"
    "Opponent behavioral summary:\n\n"
    "{summary_text}\n\n"
    "Please output an updated opponent profile using the following format:\n\n"
    + fmt2 + "\n"
    "Interpretation hints:\n" + hints
)

s = section("Third-Person Oracle-Auditor Prompt")
third, _ = verbatim_after(s)

s = section("Oracle Prompt for Auditing Second-Person")
fourth, _ = verbatim_after(s)
fourth += "\nReplace the example values with your actual assessment, but keep the same keys, types, and structure.\n"

templates = {
    "first_person": (first, ["hole_cards", "community_cards", "street", "pot_size", "call_amount",
                              "min_raise", "max_raise", "pot_odds:.2f", "position_text",
                              "opponent_actions_text", "opponent_profiles_text"], False),
    "opponent_profile": (second, ["summary_text"], False),
    "oracle_first_person": (third, ['sample.get("player")', 'sample.get("round")', 'sample.get("street")',
                                     "hole_cards_str", "board_cards_str", "pot_size", "call_amount",
                                     "min_raise", "max_raise", "position_info_str", "opp_actions_str",
                                     "hs_str", "hs_bucket", "pot_odds_str", "risk_str", "self_reasoning",
                                     "profiles_str", "action_str"], True),
    "oracle_second_person": (fourth, [], False),
}

(root / "assets/templates").mkdir(parents=True, exist_ok=True)
(root / "tests/golden").mkdir(parents=True, exist_ok=True)
for name, (text, placeholders, escapes) in templates.items():
    (root / f"assets/templates/{name}.txt").write_bytes(text.encode("utf-8"))
    golden = text
    for p in placeholders:
        token = "{" + p + "}"
        assert token in golden, (name, p)
        golden = golden.replace(token, "@@" + p.split(":")[0] + "@@")
    if escapes:
        golden = golden.replace("{{", "{").replace("}}", "}")
    (root / f"tests/golden/{name}.golden").write_bytes(golden.encode("utf-8"))
    print(name, len(text), "bytes")
