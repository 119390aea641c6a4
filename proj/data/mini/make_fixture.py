#!/usr/bin/env python3
"""Regenerates the mini corpus, the synthetic benchmark and the scripted mock rules."""
import json
import re
from pathlib import Path

HERE = Path(__file__).resolve().parent

CONCEPTS = {
    "Alzheimer's disease": ("Disease", "MESH:D000544"),
    "AD": ("Disease", "MESH:D000544"),
    "early-onset Alzheimer's disease": ("Disease", "MESH:D000544"),
    "vascular dementia": ("Disease", "MESH:D015140"),
    "dementia with Lewy bodies": ("Disease", "MESH:D020961"),
    "type 2 diabetes": ("Disease", "MESH:D003924"),
    "hypertension": ("Disease", "MESH:D006973"),
    "neuronal death": ("Disease", "MESH:D009410"),
    "cognitive decline": ("Disease", "MESH:D060825"),
    "neurofibrillary tangles": ("Disease", "MESH:D016874"),
    "thiamine deficiency": ("Disease", "MESH:D013832"),
    "APOE4": ("Gene", "348"),
    "APOE": ("Gene", "348"),
    "TREM2": ("Gene", "54209"),
    "BACE1": ("Gene", "23621"),
    "PSEN1": ("Gene", "5663"),
    "GSK3B": ("Gene", "2932"),
    "CD33": ("Gene", "945"),
    "clusterin": ("Gene", "1191"),
    "tau": ("Gene", "4137"),
    "alpha-synuclein": ("Gene", "6622"),
    "amyloid precursor protein": ("Gene", "351"),
    "acetylcholinesterase": ("Gene", "43"),
    "NMDA receptor": ("Gene", "2902"),
    "donepezil": ("Chemical", "MESH:D000077265"),
    "galantamine": ("Chemical", "MESH:D005702"),
    "memantine": ("Chemical", "MESH:D008559"),
    "metformin": ("Chemical", "MESH:D008687"),
    "aducanumab": ("Chemical", "MESH:C000601010"),
    "lecanemab": ("Chemical", "MESH:C000709563"),
    "TPP": ("Chemical", "MESH:D013835"),
    "amyloid beta": ("Chemical", "MESH:D016229"),
    "mice": ("Species", "10090"),
    "SH-SY5Y": ("CellLine", "CVCL:0019"),
}

# (pmid, year, title, abstract, generative output, pair-wise answers)
DOCS = [
    ("31000001", 2011, "APOE4 and amyloid deposition.",
     "The APOE4 allele increases amyloid beta deposition in the cortex of patients with Alzheimer's disease. "
     "Carriers of APOE4 showed earlier plaque formation.",
     "APOE4 | increases | amyloid beta deposition\namyloid beta deposition | associates | Alzheimer's disease",
     []),
    ("31000002", 2011, "Donepezil in Alzheimer's disease.",
     "Donepezil treatment improved cognition in Alzheimer's disease. "
     "donepezil reversibly inhibits acetylcholinesterase in the synaptic cleft.",
     "donepezil | treats | Alzheimer's disease, donepezil | inhibits | acetylcholinesterase",
     [("donepezil", "Alzheimer's disease",
       "Donepezil is prescribed for dementia. So the answer is: A. treats")]),
    ("31000003", 2012, "TREM2 variants and microglia.",
     "Rare TREM2 variants raise the risk of Alzheimer's disease. "
     "TREM2 signalling regulates microglia activation around plaques.",
     "TREM2 | regulates | microglia activation\nTREM2 | associates | Alzheimer's disease",
     [("TREM2", "Alzheimer's disease",
       "TREM2 variants change disease risk. So the answer is: B. associates")]),
    ("31000004", 2012, "Tau aggregation.",
     "Hyperphosphorylated tau forms neurofibrillary tangles that spread through the cortex in Alzheimer's disease.",
     "tau | forms | neurofibrillary tangles\nneurofibrillary tangles | associates | Alzheimer's disease",
     []),
    ("31000005", 2013, "Memantine pharmacology.",
     "memantine binds the NMDA receptor with moderate affinity. "
     "In moderate Alzheimer's disease memantine treats agitation and slows decline.",
     "memantine | binds | NMDA receptor\nmemantine | treats | Alzheimer's disease",
     [("memantine", "Alzheimer's disease",
       "Memantine is licensed for moderate to severe dementia. So the answer is: A. treats")]),
    ("31000006", 2013, "BACE1 processing of APP.",
     "BACE1 cleaves amyloid precursor protein at the beta site, and sequential cleavage of amyloid precursor protein "
     "produces amyloid beta that associates with Alzheimer's disease.",
     "BACE1 | cleaves | amyloid precursor protein\namyloid precursor protein | produces | amyloid beta\n"
     "amyloid beta | associates | Alzheimer's disease",
     [("BACE1", "amyloid precursor protein",
       "BACE1 processes APP. So the answer is: E. others, please specify: cleaves")]),
    ("31000007", 2014, "PSEN1 mutations.",
     "PSEN1 mutations are the most frequent cause of early-onset Alzheimer's disease, "
     "which clinically resembles late-onset Alzheimer's disease.",
     "PSEN1 | associates | early-onset Alzheimer's disease\n"
     "early-onset Alzheimer's disease | resembles | Alzheimer's disease",
     []),
    ("31000008", 2014, "Thiamine deficiency and APP processing.",
     "Thiamine pyrophosphate (TPP) levels are reduced in thiamine deficiency. "
     "In SH-SY5Y cells and mice, thiamine deficiency accompanied cognitive decline.",
     "thiamine deficiency | downregulates | TPP, thiamine deficiency | associates | cognitive decline, "
     "this line is not a triple",
     []),
    ("31000009", 2015, "Clusterin and lipoprotein metabolism.",
     "clusterin binds amyloid beta and acts as a chaperone. "
     "As an apolipoprotein, clusterin associates with lipoprotein metabolism in the brain.",
     "clusterin | binds | amyloid beta\nclusterin | associates | lipoprotein metabolism",
     []),
    ("31000010", 2015, "Hypertension and vascular dementia.",
     "Midlife hypertension associates with vascular dementia. "
     "vascular dementia often resembles Alzheimer's disease in late stages.",
     "hypertension | associates | vascular dementia\nvascular dementia | resembles | Alzheimer's disease",
     [("vascular dementia", "Alzheimer's disease",
       "Both cause memory loss. So the answer is: A. resembles")]),
    ("31000011", 2016, "Galantamine efficacy.",
     "galantamine inhibits acetylcholinesterase and modulates nicotinic receptors. "
     "Trials show galantamine treats mild Alzheimer's disease.",
     "galantamine | treats | Alzheimer's disease\ngalantamine | inhibits | acetylcholinesterase",
     []),
    ("31000012", 2016, "Aging and oxidative stress.",
     "Aging increases oxidative stress in neurons of mice, and oxidative stress causes neuronal death.",
     "aging | increases | oxidative stress\noxidative stress | causes | neuronal death",
     []),
    ("31000013", 2017, "GSK3B and tau phosphorylation.",
     "GSK3B upregulates tau phosphorylation, and tau phosphorylation associates with neurofibrillary tangles.",
     "GSK3B | upregulates | tau phosphorylation\ntau phosphorylation | associates | neurofibrillary tangles",
     []),
    ("31000014", 2017, "Alpha-synuclein in Lewy body disease.",
     "alpha-synuclein aggregates define dementia with Lewy bodies, "
     "and dementia with Lewy bodies resembles Alzheimer's disease in its cognitive profile.",
     "alpha-synuclein | associates | dementia with Lewy bodies\n"
     "dementia with Lewy bodies | resembles | Alzheimer's disease",
     []),
    ("31000015", 2018, "Aducanumab trial.",
     "aducanumab binds aggregated amyloid beta. "
     "In early Alzheimer's disease aducanumab palliates symptoms while amyloid beta associates with decline.",
     "aducanumab | binds | amyloid beta\naducanumab | palliates | Alzheimer's disease\n"
     "amyloid beta | associates | Alzheimer's disease",
     [("aducanumab", "Alzheimer's disease",
       "The antibody lowers plaque but benefit is modest. So the answer is: B. palliates")]),
    ("31000016", 2018, "APOE in lipid transport.",
     "APOE regulates lipoprotein transport in the brain. "
     "The APOE4 isoform downregulates amyloid beta clearance.",
     "APOE | regulates | lipoprotein transport\nAPOE4 | downregulates | amyloid beta clearance",
     []),
    ("31000017", 2019, "CD33 and microglial phagocytosis.",
     "CD33 downregulates microglia phagocytosis, and CD33 variants associate with Alzheimer's disease.",
     "CD33 | downregulates | microglia phagocytosis\nCD33 | associates | Alzheimer's disease",
     [("CD33", "Alzheimer's disease",
       "CD33 is a risk locus. So the answer is: B. associates")]),
    ("31000018", 2019, "Metformin and cognition.",
     "metformin treats type 2 diabetes. "
     "Patients with type 2 diabetes show faster cognitive decline.",
     "metformin | treats | type 2 diabetes\ntype 2 diabetes | associates | cognitive decline",
     [("metformin", "type 2 diabetes",
       "Metformin is first line therapy. So the answer is: A. treats")]),
    ("31000019", 2020, "Lecanemab and protofibrils.",
     "lecanemab binds amyloid beta protofibrils, and amyloid beta protofibrils associate with synaptic loss "
     "in Alzheimer's disease.",
     "lecanemab | binds | amyloid beta protofibrils\namyloid beta protofibrils | associates | synaptic loss",
     []),
    ("31000020", 2021, "Regional vulnerability.",
     "neurofibrillary tangles first appear in the entorhinal cortex, "
     "and the hippocampus is affected by Alzheimer's disease soon after.",
     "neurofibrillary tangles | first appear in | entorhinal cortex\n"
     "hippocampus | affected by | Alzheimer's disease",
     []),
]

A, B, C, D = "A", "B", "C", "D"

# dataset, stem, options, gold, entities, key triple, baseline letter,
# optional: (distractor fragment, wrong letter), rerank lead distractor
QUESTIONS = [
    ("MedQA", "A 72-year-old woman with progressive memory loss is started on a medication that inhibits "
     "acetylcholinesterase. Which drug was most likely prescribed?",
     ["memantine", "donepezil", "aducanumab", "metformin"], B,
     "acetylcholinesterase, memory loss", ("donepezil", "inhibits", "acetylcholinesterase"), B),
    ("MedQA", "A 68-year-old man with Alzheimer disease is enrolled in a trial of an antibody that binds soluble "
     "amyloid beta protofibrils. Which agent is being studied?",
     ["lecanemab", "donepezil", "galantamine", "memantine"], A,
     "Alzheimer disease, amyloid beta protofibrils", ("lecanemab", "binds", "amyloid beta protofibrils"), C,
     None, ("amyloid beta protofibrils", "associates", "synaptic loss")),
    ("MedQA", "A 55-year-old patient with early-onset dementia has a strong family history of the disease. "
     "A mutation in which gene is most likely?",
     ["APOE", "PSEN1", "CD33", "TREM2"], B,
     "early-onset Alzheimer's disease, dementia", ("PSEN1", "associates", "early-onset Alzheimer's disease"), A),
    ("MedQA", "A 70-year-old woman with moderate Alzheimer's disease is given a drug that blocks the NMDA receptor. "
     "Which drug is it?",
     ["donepezil", "rivastigmine", "memantine", "galantamine"], C,
     "NMDA receptor, Alzheimer's disease", ("memantine", "binds", "NMDA receptor"), C),
    ("MedQA", "A researcher studies a microglial receptor whose loss of function variants raise Alzheimer's disease "
     "risk and which regulates microglia activation. Which receptor is it?",
     ["TREM2", "BACE1", "GSK3B", "PSEN1"], A,
     "microglia activation, Alzheimer's disease", ("TREM2", "regulates", "microglia activation"), A),
    ("MedQA", "A 74-year-old man with long-standing hypertension develops stepwise cognitive decline. "
     "Which form of dementia is most likely?",
     ["dementia with Lewy bodies", "vascular dementia", "frontotemporal dementia", "Alzheimer's disease"], B,
     "hypertension, cognitive decline", ("hypertension", "associates", "vascular dementia"), B),
    ("MedQA", "A 66-year-old man with dementia has visual hallucinations and parkinsonism. "
     "Aggregates of which protein are expected?",
     ["tau", "amyloid beta", "alpha-synuclein", "TDP-43"], C,
     "dementia with Lewy bodies, parkinsonism", ("alpha-synuclein", "associates", "dementia with Lewy bodies"), C),
    ("MedQA", "A patient with chronic alcohol use has thiamine deficiency and memory impairment. "
     "Levels of which cofactor are reduced?",
     ["TPP", "NADH", "FAD", "coenzyme A"], A,
     "thiamine deficiency, memory impairment", ("thiamine deficiency", "downregulates", "TPP"), B),
    ("MedQA", "A 60-year-old man with type 2 diabetes asks whether his condition affects his brain. "
     "Type 2 diabetes is associated with which outcome?",
     ["improved memory", "cognitive decline", "reduced amyloid beta", "hippocampal growth"], B,
     "type 2 diabetes", ("type 2 diabetes", "associates", "cognitive decline"), B),
    ("MedQA", "A 77-year-old woman with Alzheimer's disease receives an anti-amyloid antibody that binds amyloid "
     "beta aggregates. Which drug is she receiving?",
     ["aducanumab", "memantine", "donepezil", "metformin"], A,
     "amyloid beta, Alzheimer's disease", ("aducanumab", "binds", "amyloid beta"), C),

    ("MedMCQA", "Neurofibrillary tangles are composed mainly of which protein?",
     ["tau", "amyloid beta", "alpha-synuclein", "clusterin"], A,
     "neurofibrillary tangles", ("tau", "forms", "neurofibrillary tangles"), A),
    ("MedMCQA", "Enzyme that cleaves amyloid precursor protein at the beta site is:",
     ["GSK3B", "BACE1", "PSEN1", "CD33"], B,
     "amyloid precursor protein", ("BACE1", "cleaves", "amyloid precursor protein"), C,
     ("'amyloid precursor protein' produces", C)),
    ("MedMCQA", "Galantamine acts by inhibiting:",
     ["acetylcholinesterase", "NMDA receptor", "BACE1", "monoamine oxidase"], A,
     "galantamine", ("galantamine", "inhibits", "acetylcholinesterase"), A),
    ("MedMCQA", "Kinase that upregulates tau phosphorylation in Alzheimer's disease:",
     ["CD33", "TREM2", "GSK3B", "APOE"], C,
     "tau phosphorylation, Alzheimer's disease", ("GSK3B", "upregulates", "tau phosphorylation"), B,
     None, ("tau phosphorylation", "associates", "neurofibrillary tangles")),
    ("MedMCQA", "Clusterin binds which peptide implicated in dementia?",
     ["insulin", "amyloid beta", "TPP", "tau"], B,
     "clusterin", ("clusterin", "binds", "amyloid beta"), B),
    ("MedMCQA", "Oxidative stress in the aging brain causes:",
     ["neuronal death", "neurogenesis", "myelination", "synaptic growth"], A,
     "oxidative stress, aging", ("oxidative stress", "causes", "neuronal death"), A),
    ("MedMCQA", "CD33 on microglia downregulates:",
     ["microglia phagocytosis", "tau phosphorylation", "lipoprotein transport", "acetylcholinesterase"], A,
     "CD33, microglia", ("CD33", "downregulates", "microglia phagocytosis"), C,
     ("'CD33' associates", D)),
    ("MedMCQA", "APOE4 reduces which process in the brain?",
     ["amyloid beta clearance", "TPP synthesis", "neurogenesis", "myelination"], A,
     "APOE4", ("APOE4", "downregulates", "amyloid beta clearance"), C),
    ("MedMCQA", "Treatable causes of dementia are ___.",
     ["Alzheimer's disease", "Hypothyroidism", "Multi-infarct dementia", "Dementia with Lewy bodies"], B,
     "dementia", None, B),
    ("MedMCQA", "Most common cause of dementia in the elderly is:",
     ["vascular dementia", "Alzheimer's disease", "dementia with Lewy bodies", "hypothyroidism"], B,
     "dementia", None, B),

    ("MMLU", "Which of the following apolipoprotein E alleles is the strongest genetic risk factor for late-onset "
     "Alzheimer's disease, acting in part by increasing amyloid beta deposition in the cortex of carriers?",
     ["APOE2", "APOE3", "APOE4", "APOE1"], C,
     "APOE4, Alzheimer's disease, amyloid beta deposition", ("APOE4", "increases", "amyloid beta deposition"), C),
    ("MMLU", "Which of the following statements about APOE and the biology of lipoprotein particles in the central "
     "nervous system is correct?",
     ["APOE regulates lipoprotein transport", "APOE is a kinase", "APOE cleaves amyloid precursor protein",
      "APOE is an antibody"], A,
     "APOE, lipoprotein transport", ("APOE", "regulates", "lipoprotein transport"), A),
    ("MMLU", "Which of the following brain regions is affected early in the course of Alzheimer's disease and is "
     "central to the formation of new declarative memories?",
     ["cerebellum", "hippocampus", "occipital lobe", "brainstem"], B,
     "Alzheimer's disease, hippocampus", ("hippocampus", "affected by", "Alzheimer's disease"), B),
    ("MMLU", "In the typical staging of Alzheimer pathology, in which of the following structures do "
     "neurofibrillary tangles first appear?",
     ["entorhinal cortex", "cerebellum", "putamen", "occipital cortex"], A,
     "neurofibrillary tangles, entorhinal cortex", ("neurofibrillary tangles", "first appear in", "entorhinal cortex"),
     C, ("'tau' forms", C)),
    ("MMLU", "Which of the following downstream consequences is the binding of lecanemab to amyloid beta "
     "protofibrils intended to prevent in patients with early disease?",
     ["synaptic loss", "hyperglycemia", "hypertension", "demyelination"], A,
     "lecanemab, amyloid beta protofibrils", ("amyloid beta protofibrils", "associates", "synaptic loss"), A),
    ("MMLU", "Which of the following best describes the relationship between early-onset Alzheimer's disease and "
     "the more common late-onset form of Alzheimer's disease?",
     ["they resemble each other clinically", "they are unrelated", "one is a vascular disorder",
      "one is caused by diabetes"], A,
     "early-onset Alzheimer's disease, Alzheimer's disease",
     ("early-onset Alzheimer's disease", "resembles", "Alzheimer's disease"), A),
    ("MMLU", "Which of the following receptors is the primary pharmacological target of memantine when it is used "
     "in the treatment of moderate to severe dementia?",
     ["acetylcholinesterase", "NMDA receptor", "BACE1", "TREM2"], B,
     "memantine, dementia", ("memantine", "binds", "NMDA receptor"), A),
    ("MMLU", "Aging is considered a major risk factor for neurodegeneration partly because, at the cellular level, "
     "aging increases which of the following?",
     ["oxidative stress", "synaptic density", "neurogenesis", "TPP"], A,
     "aging, neurodegeneration", ("aging", "increases", "oxidative stress"), A),
    ("MMLU", "Which of the following is the most important modifiable risk factor for vascular dementia in "
     "population studies of older adults?",
     ["hypertension", "APOE2", "thiamine excess", "microglia"], A,
     "vascular dementia", ("hypertension", "associates", "vascular dementia"), A),
    ("MMLU", "Which of the following drugs, approved for type 2 diabetes, is being explored as a way to slow "
     "cognitive decline in older adults?",
     ["metformin", "donepezil", "lecanemab", "memantine"], A,
     "type 2 diabetes, cognitive decline", ("metformin", "treats", "type 2 diabetes"), A),

    ("QA4MRE", "What does TREM2 regulate?",
     ["microglia activation", "TPP", "NMDA receptor", "insulin"], A,
     "TREM2", ("TREM2", "regulates", "microglia activation"), D,
     None, ("TREM2", "associates", "Alzheimer's disease")),
    ("QA4MRE", "What does donepezil treat?",
     ["type 2 diabetes", "Alzheimer's disease", "hypertension", "infection"], B,
     "donepezil", ("donepezil", "treats", "Alzheimer's disease"), B),
    ("QA4MRE", "What does BACE1 cleave?",
     ["amyloid precursor protein", "tau", "clusterin", "APOE"], A,
     "BACE1", ("BACE1", "cleaves", "amyloid precursor protein"), A),
    ("QA4MRE", "What does aducanumab palliate?",
     ["Alzheimer's disease", "hypertension", "type 2 diabetes", "infection"], A,
     "aducanumab", ("aducanumab", "palliates", "Alzheimer's disease"), A),
    ("QA4MRE", "What does amyloid precursor protein produce?",
     ["amyloid beta", "tau", "TPP", "insulin"], A,
     "amyloid precursor protein", ("amyloid precursor protein", "produces", "amyloid beta"), B),
    ("QA4MRE", "Which microglial gene is associated with Alzheimer's disease?",
     ["CD33", "PSEN1", "BACE1", "GSK3B"], A,
     "Alzheimer's disease, microglia", ("CD33", "associates", "Alzheimer's disease"), B),
    ("QA4MRE", "What does tau phosphorylation lead to?",
     ["neurofibrillary tangles", "amyloid plaques", "diabetes", "hypertension"], A,
     "tau phosphorylation", ("tau phosphorylation", "associates", "neurofibrillary tangles"), A),
    ("QA4MRE", "What does clusterin associate with?",
     ["lipoprotein metabolism", "vision", "hearing", "skin"], A,
     "clusterin", ("clusterin", "associates", "lipoprotein metabolism"), None),
    ("QA4MRE", "Which disease resembles dementia with Lewy bodies?",
     ["Alzheimer's disease", "asthma", "gout", "eczema"], A,
     "dementia with Lewy bodies", ("dementia with Lewy bodies", "resembles", "Alzheimer's disease"), A),
    ("QA4MRE", "Which vitamin deficiency causes scurvy?",
     ["vitamin C", "vitamin D", "vitamin A", "vitamin K"], A,
     "", None, A),
]

JUDGE_OVERRIDES = {
    "Which vitamin deficiency causes scurvy?": "No.",
    "Oxidative stress in the aging brain causes:": "Maybe, it depends.",
}


def mentions_for(pmid, title, abstract):
    text = title + " " + abstract
    found = []
    for surface, (etype, cid) in CONCEPTS.items():
        pattern = r"(?<![\w-])" + re.escape(surface) + r"(?![\w-])"
        for m in re.finditer(pattern, text, flags=re.IGNORECASE):
            found.append((m.start(), m.end(), m.group(0), etype, cid))
    # Longest match wins where spans overlap.
    found.sort(key=lambda f: (f[0], -(f[1] - f[0])))
    kept = []
    for f in found:
        if kept and f[0] < kept[-1][1]:
            continue
        kept.append(f)
    return kept


def first_surface(mentions, name):
    for m in mentions:
        if m[2].lower() == name.lower():
            return m[2]
    raise KeyError(name)


def render_options(options):
    return "\n".join(f"{chr(65 + i)}. {o}" for i, o in enumerate(options))


def arrow(t):
    return f"{t[0]}->{t[1]}->{t[2]}"


def sentence(t):
    return f"'{t[0]}' {t[1]} '{t[2]}'"


def main():
    blocks, years, rules = [], [], []
    for pmid, year, title, abstract, output, pairs in DOCS:
        mentions = mentions_for(pmid, title, abstract)
        lines = [f"{pmid}|t|{title}", f"{pmid}|a|{abstract}"]
        lines += [f"{pmid}\t{s}\t{e}\t{surf}\t{t}\t{cid}" for s, e, surf, t, cid in mentions]
        blocks.append("\n".join(lines))
        years.append(f"{pmid}\t{year}")
        first_sentence = abstract.split(". ")[0]
        rules.append({"tag": "re_generative", "contains": first_sentence, "response": output})
        for head, tail, answer in pairs:
            h_type = CONCEPTS[head][0]
            t_type = CONCEPTS[tail][0]
            rules.append({"tag": "re_pairwise",
                          "contains": [first_sentence, f'{h_type} entity "{first_surface(mentions, head)}" and '
                                                       f'{t_type} entity "{first_surface(mentions, tail)}"'],
                          "response": answer})
    rules.append({"tag": "re_generative", "contains": "", "response": ""})
    rules.append({"tag": "re_pairwise", "contains": "", "response": "The abstract does not say."})

    samples = []
    per_dataset = {}
    for q in QUESTIONS:
        dataset, stem, options, gold, entities, key, baseline = q[:7]
        distractor = q[7] if len(q) > 7 else None
        lead = q[8] if len(q) > 8 else None
        per_dataset[dataset] = per_dataset.get(dataset, 0) + 1
        sid = f"{dataset.lower()}-{per_dataset[dataset]:02d}"
        samples.append({"id": sid, "dataset": dataset, "question": stem,
                        "options": {chr(65 + i): o for i, o in enumerate(options)}, "gold": gold})

        rules.append({"tag": "entity_extract", "contains": stem, "response": entities})
        if key:
            ranked = []
            if lead:
                ranked.append(arrow(lead))
            ranked.append(arrow(key))
            ranked.append("unlisted entity -> relates to -> nothing")
            rules.append({"tag": "self_retrieve", "contains": stem,
                          "response": "\n".join(f"Reranked Triple{i + 1}: {r}" for i, r in enumerate(ranked))})
            if distractor:
                frag, wrong = distractor
                rules.append({"tag": "inference", "contains": [stem, sentence(key), frag],
                              "response": f"Both facts seem relevant. So the answer is: {wrong}."})
            answer_text = options[ord(gold) - 65]
            rules.append({"tag": "inference", "contains": [stem, sentence(key)],
                          "response": f"The evidence states that {sentence(key)}. "
                                      f"Therefore the answer is {answer_text} (option {gold})"})
        if baseline:
            rules.append({"tag": "inference", "contains": stem,
                          "response": f"Let me recall the relevant facts.\nSo the answer is: {baseline}."})
        else:
            rules.append({"tag": "inference", "contains": stem, "response": "I am not certain."})
        rules.append({"tag": "judge", "contains": stem, "response": JUDGE_OVERRIDES.get(stem, "Yes")})

    rules += [
        {"tag": "entity_extract", "contains": "", "response": ""},
        {"tag": "self_retrieve", "contains": "", "response": ""},
        {"tag": "verbalize", "contains": "", "response": ""},
        {"tag": "inference", "contains": "", "response": "I am not certain."},
        {"tag": "judge", "contains": "", "response": "No"},
    ]

    (HERE / "corpus.pubtator").write_text("\n\n".join(blocks) + "\n")
    (HERE / "years.tsv").write_text("\n".join(years) + "\n")
    (HERE / "benchmark.jsonl").write_text("".join(json.dumps(s, ensure_ascii=False) + "\n" for s in samples))
    (HERE / "mock_rules.json").write_text(json.dumps({"rules": rules}, indent=1, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
