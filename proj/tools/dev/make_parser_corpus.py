#!/usr/bin/env python3
"""Writes the first-person parser fixture corpus (200 cases).

Kinds: well_formed, mis_cased, fenced, truncated, garbage. Well-formed,
mis-cased and fenced cases carry the expected canonical values.
"""
import json
import random
import sys

ENUMS = {
    "hand_strength": ("HandStrength", ["weak", "medium", "strong"]),
    "risk_attitude": ("RiskAttitudeThisHand", ["conservative", "neutral", "aggressive"]),
    "main_goal": ("MainGoal", ["minimize_loss", "take_small_edge", "maximize_value", "bluff"]),
    "perceived_opponent_risk": ("PerceivedOpponentRisk", ["low", "medium", "high"]),
}
ACTION_TYPES = ["fold", "check", "call", "bet_small", "bet_big"]
RISK_LEVELS = ["low", "medium", "high"]
NARRATIVES = [
    "Top pair and the pot is small.",
    "Nothing yet but a flush draw.",
    "Villain keeps firing, I fold.",
    "Set on a dry board.",
    "Cheap to see the turn.",
]


def recase(token, rng):
    style = rng.randrange(3)
    if style == 0:
        return token.upper()
    if style == 1:
        return token.capitalize()
    return "".join(c.upper() if rng.random() < 0.5 else c for c in token)


def case(rng, kind):
    values = {k: rng.choice(v[1]) for k, v in ENUMS.items()}
    values["intended_action_type"] = rng.choice(ACTION_TYPES)
    values["intended_risk_level"] = rng.choice(RISK_LEVELS)
    action = rng.choice(["fold", "check", "call", "raise"])
    amount = rng.randrange(20, 3000) if action == "raise" else 0
    shown = dict(values)
    if kind == "mis_cased":
        shown = {k: recase(v, rng) for k, v in values.items()}
    lines = ["[SELF-EXPLANATION]", f'NaturalLanguage: "{rng.choice(NARRATIVES)}"', "", "Beliefs:"]
    for key, (label, _) in ENUMS.items():
        lines.append(f"- {label}: {shown[key]}")
    lines.append('- ProfileInfluence: "P3 raises light"')
    lines.append('- IntendedReason: "pot odds"')
    lines += ["", "ChosenActionSummary:"]
    lines.append(f"- IntendedActionType: {shown['intended_action_type']}")
    lines.append(f"- IntendedRiskLevel: {shown['intended_risk_level']}")
    lines += ["[/SELF-EXPLANATION]", "", "DECISION:"]
    shown_action = recase(action, rng) if kind == "mis_cased" else action
    lines.append(json.dumps({"action": shown_action, "amount": amount}))
    text = "\n".join(lines) + "\n"
    if kind == "fenced":
        text = "Here is my answer.\n```\n" + text + "```\n"
    expected = dict(values)
    expected["decision"] = {"action": action, "amount": amount}
    return text, expected


def main(path):
    rng = random.Random(20240607)
    cases = []
    plan = [("well_formed", 60), ("mis_cased", 35), ("fenced", 35), ("truncated", 35), ("garbage", 35)]
    for kind, n in plan:
        for i in range(n):
            if kind in ("well_formed", "mis_cased", "fenced"):
                text, expected = case(rng, kind)
                cases.append({"id": f"{kind}_{i:02d}", "kind": kind, "text": text, "expected": expected})
            elif kind == "truncated":
                text, _ = case(rng, "well_formed")
                cut = rng.randrange(1, len(text) - 1)
                cases.append({"id": f"{kind}_{i:02d}", "kind": kind, "text": text[:cut]})
            else:
                alphabet = '{}[]":,-\n DECISION[SELF-EXPLANATION]raise0123456789\\\té'
                text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 400)))
                cases.append({"id": f"{kind}_{i:02d}", "kind": kind, "text": text})
    with open(path, "w", encoding="utf-8") as f:
        json.dump(cases, f, indent=1, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/parser_corpus.json")
