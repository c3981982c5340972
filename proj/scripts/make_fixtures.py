#!/usr/bin/env python3
"""Regenerates the synthetic fixture corpora under data/fixtures.

All text is synthetic. Output is deterministic for a given --seed.
"""

import argparse
import json
import random
from pathlib import Path

LAT = ["left", "right", "bilateral"]
LOC = ["frontal", "temporal", "parietal", "occipital", "central", "frontotemporal", "temporoparietal",
       "posterior temporal", "anterior temporal", "parieto-occipital"]
ELECTRODE = ["F7", "F8", "T3", "T4", "T5", "T6", "C3", "C4", "P3", "P4", "O1", "O2", "Fp1", "Fp2"]
DEGREE = ["mild", "moderate", "marked", "intermittent", "occasional", "frequent", "rare"]
SLOW = ["slowing", "focal slowing", "polymorphic delta activity", "rhythmic delta activity", "theta slowing",
        "delta slowing", "intermittent slowing"]
EPI = ["sharp waves", "spikes", "spike-and-wave discharges", "epileptiform discharges", "sharp-and-slow-wave complexes",
       "polyspikes", "periodic discharges", "lateralized periodic discharges"]
BAND = ["delta", "theta", "alpha", "beta"]
STATE = ["wakefulness", "drowsiness", "stage N2 sleep", "hyperventilation", "photic stimulation"]

FINDINGS = [
    "The background shows a {adj} posterior-dominant alpha rhythm of {hz} Hz that is reactive to eye opening.",
    "There is {deg} {slow} over the {lat} {loc} region.",
    "{Deg} {epi} are seen over the {lat} {loc} region, maximal at {el}.",
    "No {epi} are seen during {state}.",
    "Intermittent {band} slowing is noted over the {lat} {loc} region during {state}.",
    "FIRDA is present bilaterally during drowsiness.",
    "Sleep spindles and vertex waves are present and symmetric during stage N2 sleep.",
    "Photic stimulation produces a symmetric photic driving response without a photoparoxysmal response.",
    "Hyperventilation produces diffuse slowing that resolves within one minute.",
    "Beta activity of {hz2} Hz is seen over the frontal regions, consistent with medication effect.",
    "There is no focal slowing and no epileptiform discharges.",
    "Triphasic waves are seen diffusely at {hz1} Hz.",
    "Without sharp waves, the {lat} {loc} region shows {deg} {slow}.",
    "The record shows {deg} diffuse slowing of the background in the {band} range.",
    "Burst suppression is present with bursts lasting two seconds.",
    "The alpha rhythm is symmetric and attenuates with eye opening.",
    "Muscle artifact obscures the {lat} temporal region at times.",
    "Rhythmic delta activity at {hz1} Hz is recorded over the {lat} {loc} region.",
    "There is a lack of reactivity to noxious stimulation.",
    "Spike-and-wave discharges at {hz1} Hz are seen in generalized bursts.",
]

IMPRESSION = [
    "Abnormal EEG due to {deg} {slow} over the {lat} {loc} region, suggesting focal cerebral dysfunction.",
    "Abnormal EEG due to {epi} over the {lat} {loc} region, indicating potential epileptogenicity.",
    "Normal awake and asleep EEG with no epileptiform discharges.",
    "Diffuse slowing is consistent with a mild encephalopathy of nonspecific etiology.",
    "No electrographic seizures were recorded.",
    "Recurrent {lat} {loc} epileptiform discharges with preserved reactivity.",
    "Abnormal EEG due to diffuse slowing and triphasic waves, consistent with a toxic metabolic encephalopathy.",
    "Absence of epileptiform discharges does not exclude a diagnosis of epilepsy.",
]

TECHNIQUE = [
    "Digital EEG was recorded with 21 electrodes placed according to the 10-20 system using bipolar and referential montages.",
    "A routine video EEG was recorded for 30 minutes during wakefulness and drowsiness.",
]

HISTORY = [
    "{age} year old with recurrent spells of unresponsiveness.",
    "{age} year old with new onset seizure on {date}.",
    "Evaluation of altered mental status.",
]

MEDS = ["Levetiracetam, lorazepam.", "None.", "Valproate, lamotrigine."]

DATES = ["03/14/2021", "2020-11-02", "July 4, 2019", "12 March 2022", "5.6.2018", "11-30-2020"]
NAMES = ["Dr. Smith", "Dr. Alvarez", "Mr. Jones", "Ms. Patel", "Dr. Lee"]


def fill(tmpl, rng):
    lat = rng.choice(LAT)
    return tmpl.format(
        adj=rng.choice(["well-formed", "poorly sustained", "low voltage", "symmetric"]),
        hz=rng.choice(["8", "9", "10", "11", "8.5", "9.5"]),
        hz1=rng.choice(["1", "1.5", "2", "3", "2.5"]),
        hz2=rng.choice(["14", "18", "20", "25"]),
        deg=rng.choice(DEGREE), Deg=rng.choice(DEGREE).capitalize(),
        slow=rng.choice(SLOW), epi=rng.choice(EPI), lat=lat, loc=rng.choice(LOC),
        el=rng.choice(ELECTRODE), band=rng.choice(BAND), state=rng.choice(STATE))


def paragraph(pool, rng, lo, hi):
    n = rng.randint(lo, hi)
    return " ".join(fill(rng.choice(pool), rng) for _ in range(n))


def dirty(s, rng):
    # Typographic noise that normalization must undo.
    if rng.random() < 0.3:
        s = s.replace(" ", "  ", 1)
    if rng.random() < 0.2:
        s = s.replace("'", "’")
    if rng.random() < 0.2:
        s = s.replace(" - ", " – ")
    if rng.random() < 0.2:
        s = s.replace(" ", " ", 1)
    return s


def raw_report(i, rng):
    lines = []
    lines.append(f"EEG REPORT  MRN: {rng.randint(1000000, 9999999)}")
    lines.append(f"Date of study: {rng.choice(DATES)}  Referring physician: {rng.choice(NAMES)}")
    lines.append("")
    lines.append("CLINICAL HISTORY: " + HISTORY[rng.randrange(len(HISTORY))].format(
        age=rng.randint(18, 90), date=rng.choice(DATES)))
    lines.append("")
    lines.append("MEDICATIONS: " + rng.choice(MEDS))
    lines.append("")
    lines.append("TECHNIQUE: " + rng.choice(TECHNIQUE))
    lines.append("")
    lines.append("FINDINGS:")
    for _ in range(rng.randint(2, 4)):
        lines.append(dirty(paragraph(FINDINGS, rng, 2, 4), rng))
        lines.append("")
    lines.append("IMPRESSION:")
    lines.append(dirty(paragraph(IMPRESSION, rng, 1, 2), rng))
    if rng.random() < 0.4:
        lines.append("")
        lines.append(f"Reviewed by {rng.choice(NAMES)} on {rng.choice(DATES)}.")
    return {"id": f"rpt{i:04d}", "text": "\r\n".join(lines) if rng.random() < 0.2 else "\n".join(lines)}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rng = random.Random(args.seed)
    with open(out / "raw_reports.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for i in range(32):
            f.write(json.dumps(raw_report(i, rng), ensure_ascii=False) + "\n")

    rng = random.Random(args.seed + 1)
    with open(out / "paragraphs_1k.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for i in range(1000):
            section = "IMPRESSION" if i % 5 == 4 else "FINDINGS"
            pool = IMPRESSION if section == "IMPRESSION" else FINDINGS
            rec = {"report_id": f"syn{i // 5:04d}", "section": section, "index": i % 5 if section == "FINDINGS" else 0,
                   "text": paragraph(pool, rng, 2, 4)}
            f.write(json.dumps(rec) + "\n")

    rng = random.Random(args.seed + 2)
    with open(out / "fuzz_10k.txt", "w", encoding="utf-8", newline="\n") as f:
        alphabet = "abcdefghijklmnopqrstuvwxyz ABCXYZ0123456789.,;:-'\"()[]<>_/\\\t"
        extras = ["é", "ü", "α", "–", "中", "\U0001F600", "<extra_id_3>", "[DATE]", "<pad>"]
        for _ in range(10000):
            n = rng.randint(0, 80)
            parts = []
            for _ in range(n):
                parts.append(rng.choice(extras) if rng.random() < 0.05 else rng.choice(alphabet))
            f.write("".join(parts).replace("\n", " ") + "\n")


if __name__ == "__main__":
    main()
