"""Regenerates corpus.json and script.json for the 3-story mini corpus.

The script answers every prompt the pipeline can send for these claims:
rewrites (all three variants share one answer per claim), explanation
parsing, the three baselines and synthetic variants. One rewrite answer
is deliberately untagged on the first attempt to exercise the re-ask.

    python3 make_fixture.py && armeval arm ... --mode record --backend script:script.json
"""
import json
import pathlib

HERE = pathlib.Path(__file__).parent

STORIES = [
    ("lighthouse", "The Lighthouse Keeper",
     "Mara kept the lighthouse on Gull Point for twenty years. Every night she climbed the ninety steps and "
     "lit the lamp. One winter a storm broke the lens, and the supply boat could not reach the island for "
     "three weeks. Mara burned oil in tin cans along the gallery rail so the ships would still see a light. "
     "When the boat finally came, the captain told her that a freighter had turned away from the rocks "
     "because of her cans. Mara only nodded and asked whether he had brought coffee. That spring she "
     "planted marigolds around the base of the tower, though the salt killed most of them."),
    ("violin", "The Borrowed Violin",
     "Teo borrowed his grandfather's violin for the school concert without asking. During rehearsal a "
     "string snapped and he hid the violin under his bed. On the night of the concert he played a "
     "borrowed school violin instead and missed two notes in the second piece. Afterward his grandfather "
     "found the case and said nothing for a long time. Then he showed Teo how to replace the string and "
     "told him about a concert in 1962 when he had forgotten his bow. The story ends with the two of them "
     "playing a duet in the kitchen while Teo's mother pretends not to listen."),
    ("orchard", "The Orchard Sale",
     "The Abernathy family decided to sell the orchard after a second dry summer. Lena, the youngest, "
     "walked the rows one last time and counted the trees her father had grafted. A developer offered "
     "more money than anyone expected. At the signing, Lena's brother asked for one week to harvest the "
     "last apples. The developer agreed. They pressed the apples into cider and gave jars to every "
     "neighbor on the road. Nobody in the family said whether they regretted the sale."),
]

# (claim text, subjectivity, ambiguity type, faith labels x3, rewrite answer, explanation items)
S = "subjective"
O = "objective"
F, U, NA = "faithful", "unfaithful", "N/A"

SUMMARIES = [
    ("lighthouse-llm-a", "lighthouse", "llm", "model-a", [
        ("Mara kept the lighthouse on Gull Point for twenty years.", O, None, [F, F, F], None, []),
        ("Every night she climbed the steps and lit the lamp.", O, None, [F, F, F], None, []),
        ("A storm destroyed the lighthouse, cutting Mara off for weeks.", S, 2, [U, F, U],
         "A storm broke the lighthouse lens, cutting Mara off for three weeks.",
         ["The storm broke the lens, not the whole lighthouse.", "The isolation lasted three weeks."]),
        ("Mara heroically saved a freighter with her improvised lights.", S, 1, [F, U, F],
         "Mara's improvised lights led a freighter to turn away from the rocks.",
         ["'Heroically' is an interpretation the story does not state.",
          "The captain reports the freighter turned away; the story does not say it was saved."]),
        ("She was too modest to accept the captain's praise.", S, 3, [U, U, F],
         "She only nodded and asked the captain whether he had brought coffee.",
         ["The story never says she was modest; it only describes her nodding."]),
    ]),
    ("lighthouse-llm-b", "lighthouse", "llm", "model-b", [
        ("The lens broke during a winter storm.", O, None, [F, F, F], None, []),
        ("Mara burned oil in cans along the rail.", O, None, [F, F, F], None, []),
        ("The marigolds she planted symbolize her hope for renewal.", S, 4, [U, U, U],
         "That spring she planted marigolds, though the salt killed most of them.",
         ["The symbolism is not stated in the story."]),
        ("This summary has covered the key events.", None, None, [NA, NA, NA], None, []),
    ]),
    ("violin-llm-a", "violin", "llm", "model-a", [
        ("Teo borrowed his grandfather's violin without asking.", O, None, [F, F, F], None, []),
        ("A string snapped during rehearsal.", O, None, [F, F, F], None, []),
        ("Teo ruined the concert by missing notes.", S, 1, [U, F, U],
         "Teo missed two notes in the second piece of the concert.",
         ["'Ruined' exaggerates two missed notes."]),
        ("His grandfather was furious when he found the case.", S, 3, [U, U, U],
         "His grandfather said nothing for a long time when he found the case.",
         ["The story describes silence, not fury."]),
        ("They played a duet in the kitchen.", O, None, [F, F, F], None, []),
    ]),
    ("violin-human-1", "violin", "human", "writer-07", [
        ("Teo hid the broken violin under his bed.", O, None, [F, F, F], None, []),
        ("He played a school violin at the concert.", O, None, [F, F, F], None, []),
        ("His grandfather forgave him by sharing a story from 1962.", S, 2, [F, F, U],
         "His grandfather told him about a concert in 1962 when he had forgotten his bow.",
         ["Forgiveness is implied at most; the story only describes the anecdote."]),
    ]),
    ("orchard-llm-a", "orchard", "llm", "model-a", [
        ("The Abernathy family sold the orchard after two dry summers.", O, None, [F, F, F], None, []),
        ("Lena counted the trees her father had grafted.", O, None, [F, F, F], None, []),
        ("The developer reluctantly granted a week for the harvest.", S, 2, [U, U, F],
         "The developer agreed to give them one week for the harvest.",
         ["The story does not say the developer was reluctant."]),
        ("They sold the cider to their neighbors.", O, None, [U, U, U],
         "They gave jars of cider to every neighbor on the road.",
         ["The cider was given away, not sold."]),
        ("The family secretly regretted the sale.", S, 4, [U, U, U],
         "Nobody in the family said whether they regretted the sale.",
         ["The story leaves their regret deliberately open."]),
    ]),
]

# Synthetic variants per claim (to_subjective for objective claims, to_objective for subjective).
SYNTH = {
    "Mara kept the lighthouse on Gull Point for twenty years.":
        "Mara devoted her life to the lighthouse on Gull Point.",
    "Every night she climbed the steps and lit the lamp.":
        "Every night she dutifully climbed the steps and lit the lamp.",
    "The lens broke during a winter storm.": "The lens was destroyed in a terrible winter storm.",
    "Mara burned oil in cans along the rail.": "Mara cleverly burned oil in cans along the rail.",
    "Teo borrowed his grandfather's violin without asking.": "Teo secretly took his grandfather's violin.",
    "A string snapped during rehearsal.": "Teo broke a string during rehearsal.",
    "They played a duet in the kitchen.": "They reconciled by playing a duet in the kitchen.",
    "Teo hid the broken violin under his bed.": "Teo guiltily hid the broken violin under his bed.",
    "He played a school violin at the concert.": "He had to settle for a school violin at the concert.",
    "The Abernathy family sold the orchard after two dry summers.":
        "The Abernathy family was forced to sell the orchard after two dry summers.",
    "Lena counted the trees her father had grafted.": "Lena sadly counted the trees her father had grafted.",
    "They sold the cider to their neighbors.": "They shared the cider with their grateful neighbors.",
}


def main():
    stories = [{"id": sid, "title": t, "text": txt} for sid, t, txt in STORIES]
    summaries = []
    rules = []
    rewrite_rules, baseline_rules, synth_rules = [], [], []
    for sm_id, story_id, kind, writer, claims in SUMMARIES:
        out_claims = []
        for i, (text, subj, typ, labels, rewrite, items) in enumerate(claims):
            cid = f"{sm_id}-{i}"
            c = {"id": cid, "text": text,
                 "faithfulness_labels": [{"annotator_id": f"ann{k}", "value": v} for k, v in enumerate(labels)]}
            if subj:
                c["subjectivity"] = subj
            if typ:
                c["ambiguity_type"] = typ
            out_claims.append(c)

            explanation = " ".join(items) if items else "The sentence is accurate and clear."
            answer = rewrite if rewrite else text
            response = f"{explanation}\n\n<answer>{answer}</answer>"
            if items:
                rules.append({"contains": ["Summarize the key reasons described in this explanation", items[0]],
                              "response": "".join(f"<item>{x}</item>" for x in items)})
            if cid == "violin-llm-a-2":
                rewrite_rules.append({"contains": [f"Sentence: {text}"], "attempt": 0,
                                      "response": f"{explanation}\n\nRewrite: {answer}"})
            rewrite_rules.append({"contains": [f"Sentence: {text}"], "response": response})

            detect = subj == S or labels.count(U) >= 2
            baseline_rules.append({"contains": ["Is this claim objective to evaluate?", f"claim in the summary: {text}\n"],
                                   "response": f"<answer>{'No' if subj == S else 'Yes'}</answer>"})
            for k in range(3):
                vote = "No" if (detect and k != 2) or (not detect and k == 1) else "Yes"
                baseline_rules.append({"contains": ["consistent with the story", f"claim in the summary: {text}\n"],
                                       "sample_index": k,
                                       "response": f"Reasoning: Checked against the story.\n\n<answer>{vote}</answer>"})
            if subj == O and text in SYNTH:
                synth_rules.append({"contains": ["<sentence>", f"Claim: {text}"],
                                    "response": f"<sentence>{SYNTH[text]}</sentence>"})
            elif subj == S and rewrite:
                synth_rules.append({"contains": ["<sentence>", f"Claim: {text}"],
                                    "response": f"<sentence>{rewrite}</sentence>"})
        summaries.append({"id": sm_id, "story_id": story_id, "writer": writer, "writer_kind": kind,
                          "claims": out_claims})

    corpus = {"schema_version": "1",
              "provenance": {"note": "hand-built 3-story fixture"},
              "stories": stories, "summaries": summaries}
    rules.append({"contains": ["Summarize the key reasons described in this explanation"],
                  "response": "<item>The sentence needs no change.</item>"})
    script = {"rules": rules + rewrite_rules + baseline_rules + synth_rules,
              "default": "I am not sure."}
    (HERE / "corpus.json").write_text(json.dumps(corpus, indent=2) + "\n")
    (HERE / "script.json").write_text(json.dumps(script, indent=2) + "\n")


if __name__ == "__main__":
    main()
