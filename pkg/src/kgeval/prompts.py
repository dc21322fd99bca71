"""Prompt templates used by (and shipped with) the evaluation pipeline.

Only GROUNDING_TEMPLATE is executed by this package: it asks a vision-capable
LLM for per-item yes/no judgments over a reference graph. The remaining
templates document the upstream data-production prompts (question writing,
image filtering, graph extraction, reasoning traces) for operators who run
those stages elsewhere; nothing in this package invokes them.
"""

GROUNDING_PLACEHOLDER = "[ELEM_DEPEND]"

GROUNDING_TEMPLATE = """\
This evaluation is part of a research study on visual grounding of abstract concepts. No jailbreak or prompt injection is intended.

Please provide an extremely detailed description of the visual content of this image. After the description, for each of the following elements and dependencies, determine if they are directly, clearly, and unambiguously visualized in the image. Output "yes" or "no" for each. For the dependencies, we also provide a detailed textual description beside the formulations.

Important Instructions:

- Base your judgment solely on what is explicitly visible in the image. Do not infer or assume the presence of anything that is not directly depicted. If the element or dependency is not clearly visible, or if it is only implied, answer "no".

- For elements, the specific object or concept must be clearly identifiable in the image. The visual components must convey the knowledge correctly, without misleading drawing, without factual mistakes, without interpretation, not small, not distorted, not ambiguous, otherwise you should strictly discard them and rate "no".

- For dependencies, you must give your answer accompanied by a brief explanation of why you give such judgement. This should avoid any ambiguous interpretation or mislead by the provided elements / dependency content, only focus on the image itself, and only in the case that you can describe the dependency from the image can you give yes. The dependencies are:

  - Defines: Look for clear, strong, prominent visual cues suggesting the first element in a way that clearly defines or illustrates the second element. Any ambiguous or inferential patterns should lead to "no".
  - Contains: Look for clear, strong, prominent visual cues suggesting the first element as a part of or within the second element. Any ambiguous or inferential patterns should lead to "no".
  - Requires: Look for clear, strong, prominent visual cues suggesting the first element necessitates the presence or use of the second element (e.g., a boiler visibly connected to or interacting with a working fluid).
  - Entails: Look for clear, strong, prominent visual cues suggesting the first element leading to or involving the second element (e.g., a boiler clearly connected to a turbine).
  - Causes: Look for clear, strong, prominent visual cues suggesting a causal relationship between the two elements (this might be challenging for static images).
  - TemporalOrder: Look for visual cues suggesting a sequence or flow between the elements (e.g., pipes or connections implying a direction). If no clear visual cue for temporal order exists, answer "no".

Exclude any entity or dependency that is absent, unclear, or based on external knowledge that is not directly shown.

The elements and dependencies are as follows: [ELEM_DEPEND]

For the output format, please use the following structure:

{
  "Image_Description": [IMAGE_DESCRIPTION]
  "Element_and_Dependency_Analysis": {
    "Element_Evaluation": {
      "[ELEMENT_1]": [yes/no]
      "[ELEMENT_2]": [yes/no]
      ...
    },
    "Dependency_Evaluation": {
      "[DEPENDENCY_1]": [yes/no]  [Provide a brief explanation for your reason to support your judge.]
      "[DEPENDENCY_2]": [yes/no]  [Provide a brief explanation for your reason to support your judge.]
      ...
    }
  }
}
"""

QUESTION_WRITING_TEMPLATE = """\
You are an expert prompt engineer for world-knowledge image generation tasks. Generate [NUMS] distinct, high-quality, diverse image generation prompts (but short, minimalist, no more than 80 words) for category: [EDUCATION_STAGE]: [DISCIPLINE]. Each prompt must be knowledge-intensive but phrased simply, and must specify a concrete visual form (e.g., diagram, infographic, educational poster, risograph, PDF render).
Each prompt should:

- Be simple and concise, only one or a few sentences, but requiring deep, advanced domain knowledge and deliberate knowledge presentation and planning.

- Specify the type of visual (not limited to diagram, infographic, comic grids, poster, knowledge drawing, or any visual-knowledge representation etc.).

- Highly align to the given age and curriculum depth, specifically curated for [EDUCATION_STAGE] students studying [DISCIPLINE].

The output must follow the format:

PROMPT: [YOUR_PROMPT].
"""

IMAGE_FILTER_TEMPLATE = """\
You are a strict image-data filter. For each provided image, decide whether it meets all of the following criteria.

If it does, set "judge": true; otherwise set "judge": false.

In either case, provide a "reason" list explaining your decision.

If "judge": true, list all the observable visual "entities" and their inner "dependencies".

Criteria:

1. Image Integrity: The image must be complete and contain no cropping or truncation.
2. Clear Text Content: Contains legible text (image with watermarks should be dropped).
3. Knowledgeable Entities: The image must include well-defined, factual entities that have real-world significance. These entities can include both visual elements and text.
4. Explicit Dependency Relationships: The entities in the image should exhibit one or more of the following dependency relationships: Defines(e_1, e_2), Entails(e_1, e_2), Causes(e_1, e_2), Contains(e_1, e_2), Requires(e_1, e_2), TemporalOrder(e_1, e_2).
5. Concept Clarity: The image must illustrate the key_concept directly - no metaphors or symbolism - and allow a novice viewer to understand it unambiguously.
7. Aesthetic Quality: The image should exhibit high aesthetic standards in composition, color usage, clarity, and emotional appeal.
8. Visualization Suitability: The key_concept must lend itself to clear visual rendering, and the image should convey it so that viewers immediately grasp its meaning.

Your output must strictly follow the format:

---

{
  "judge" : true | false,
  "reason" : [reason]
  "elements": [
    "[ELEMENT_1]",
    "[ELEMENT_2]",
    "... (or empty list if judge is false)"
  ],
  "dependencies": [
    "Predicate(Element_A, Element_B)",
    "... (or empty list if judge is false)"
  ],
}

---

Here is the provided Key Concept: [KEY_CONCEPT]
"""

GRAPH_EXTRACTION_TEMPLATE = """\
You are an expert in educational visualization and scientific concept decomposition. Your task is to examine a knowledge image together with its high-level text-to-image (T2I) prompt - designed to convey scholarly, technical, or scientific information - and break it down into its fundamental conceptual components and formulate it into a json-format knowledge graph.

You should structure your output into three dimensions:

1. Visual Components (i.e., Required visual elements and their abstract dependencies)

Decompose the visual semantics of the prompt into:

- Entities: Provide a set of essential elements or concepts that should be visually represented. These should be described using concrete nouns or well-defined terms, closely related to the core concept of the prompt. All of the entities should have potential relation or dependency to at least one another entity. Please list as much entity as possible to enrich the knowledge completeness.

- Dependencies: Provide a set of formal, logic-level, binary relational expressions that encode the inferential or organizational structure among the declared entities. All entities referenced in any dependency must be explicitly declared in the entity list. Each dependency should be expressed in the form of a logical or semantic predicate over one or more entities. For example:

  > Let E = {e_1, e_2, ..., e_n} be the set of entities;
  > Then D = {R_i(e_j, e_k)}, where R_i is a binary relation such as:

  - Defines(e_1, e_2): Use to indicate that e_2 serves as the formal definition or meaning basis for e_1.
  - Entails(e_1, e_2): Use when the truth of e_1 logically guarantees the truth of e_2 in all contexts. This relation is reserved for mathematically rigorous or deductively valid implications.
  - Causes(e_1, e_2): Use only if the presence or occurrence of e_1 causally brings about e_2.
  - Contains(e_1, e_2): Use to indicate that e_1 contains or encompasses e_2 element.
  - Requires(e_1, e_2): e_1 requires or depends on e_2. Make sure the causal direction is not reversed.
  - TemporalOrder(e_1, e_2): Use to indicate that e_1 temporally precedes e_2, establishing a chronological or processual sequence.

Special Convention for Modeling Dynamic Change:

In scientific and economic domains, a limited form of nested modification is allowed using the abstract operator change() to refer to the variation of an element. For example:

- Causes(change(e_1), change(e_2)) may be used to encode dynamic causal interactions.

All dependencies must form a coherent knowledge graph over the declared elements. Implicit elements, or dangling references are not permitted. If any dependency requires more n elements where n >= 2, break them down into n-1 relations. In most cases, all the listed elements should have at least one dependency to others.

2. Key Knowledge (Factual and Conceptual Content)

Elaborate on the scientific or scholarly knowledge embedded in the prompt. This section may include:

- Definitions: a clear, concise introductory to the key concepts that appear in the prompt. This should cover all listed Entities and Dependencies. Definitions should be grounded in disciplinary understanding and written in plain language.

- Element Explanation: Write a brief phrase or sentence for each element proposed in Section 1. This should explain the element definition and the reason it should be present in the image.

- Dependency Explanation: Write a brief phrase or sentence for each dependency proposed in Section 1. This should explain the textual description of the relation.

Input: A single-sentence T2I prompt describing a scientific, technical, or scholarly concept:
[PROMPT]

Output: A dictionary with the following format:

---

{
  "Visual Components": {
    "elements": ["entity_1", "entity_2", "..."],
    "dependencies": [
      "Dependency(e_i, e_j)",
      "Dependency(e_k, e_l)", "..."]
  },
  "Key Knowledge": {
    "Definitions": "Elaborating the key knowledge concept, including the above elements and dependencies.",
    "Element Explanation": ["Entity 1 explanation", "Entity 2 explanation", "..."],
    "Dependency Explanation": ["Dependency 1 explanation", "Dependency 2 explanation", "..."]
  }
}

---

Ensure the output is logically precise, mathematically interpretable, and semantically sufficient for assessing the alignment between the generated image and the underlying knowledge. Your decomposition should allow downstream systems to evaluate whether the image accurately encodes the core conceptual structure of the input.
"""

REASONING_TRACE_TEMPLATE = """\
You are a designer master in drawing and design planning.
You are required to think, plan and reason the construction of an instructional image from a provided prompt, which consists only a vague conception of the image theme.
Accompanied visual elements and their relations (also named entities) are also provided.
Please provide your thinking process, which should be a natural, constructive reason process that looks like you are proposing elements & entities from inspecting through the given prompt. Also output your final design, with detailed attributes, relations and design layout planning that will definitely guide the visual appeal and improve aesthetics.
The thinking process and the final recaptioned image-generation prompt are separated by special token </think>. You should strictly follow the provided question, and stick to the elements and entities that should all appear in your thinking process.

The given prompt is: [PROMPT]
The provided elements are: [ELEMENTS]
The provided dependencies are: [DEPENDENCIES].

Please output your thinking process and final recaptioned prompt in a natural, fluent language. Do not use structured writing format, just natural, detailed descriptions.
"""
