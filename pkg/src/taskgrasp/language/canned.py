"""Canned responses served by the offline stub provider.

Part label vocabularies follow published example outputs for these household
categories; the split into two scales and all description texts are our own.
"""

PART_LABELS = {
    "bottle": (["body", "lid"], ["neck", "rim"]),
    "bowl": (["body", "rim"], ["surface", "bottom"]),
    "cameras": (["body", "lens"], ["buttons", "surface", "lens_body", "glass", "display"]),
    "cup": (["body", "rim"], ["surface", "base"]),
    "cylinder_bottle": (["body", "head"], ["surface", "neck", "cap"]),
    "headphones": (["body", "band"], ["cap", "cable", "mic"]),
    "knife": (["blade", "handle"], ["edge", "spine", "tip", "grip", "butt"]),
    "lotion_pump": (["head", "body"], ["nozzle", "neck", "container surface"]),
    "mug": (["body", "handle"], ["rim", "side surface", "base"]),
    "pen": (["body", "head"], ["clip", "barrel", "grip", "nib", "sleeve", "end plug"]),
    "pincer": (["handle", "jaws"], ["pivot", "hinge", "tip", "blade"]),
    "power_drill": (["body", "handle"], ["trigger", "chuck", "switch", "chuck key"]),
    "scissors": (["blade", "handle"], ["blade edge", "blade surface", "finger loop", "handle grip", "pivot screw"]),
    "squeezable": (["body", "head"], ["body surface", "neck", "spout", "grip_section"]),
    "trigger_sprayer": (["head", "body"], ["nozzle", "container surface", "neck"]),
    "wrench": (["handle", "jaw"], ["slider", "movable jaw", "fixed jaw", "adjustment screw"]),
}

CATEGORY_TASK = {
    ("bottle", "hold"): (
        "Hold the bottle by its cylindrical body. The body is the widest section and has a "
        "roughly constant circular cross-section, so the fingers can wrap around it evenly. "
        "Wrapping the palm around the body gives a stable grip that supports the weight of "
        "the contents without the bottle tipping."
    ),
    ("bottle", "use"): (
        "To use a bottle the hand works the lid at the top. The lid is a short cylinder "
        "whose diameter matches the opening, often ridged on its side. The thumb and "
        "fingertips pinch the ridged side and twist it to open or close the bottle."
    ),
    ("bottle", "liftup"): (
        "Lift the bottle by the middle of its body. This region is smooth and cylindrical "
        "and sits near the center of mass. A full-hand wrap there keeps the bottle upright "
        "and balanced while it is raised."
    ),
    ("mug", "hold"): (
        "Hold the mug by its handle. The handle is a curved loop attached to the side of "
        "the cylindrical body, with an opening sized for one or more fingers. Hooking the "
        "fingers through the loop keeps the hot body away from the palm."
    ),
    ("mug", "use"): (
        "To drink from a mug grasp the handle. The loop shape lets the fingers pass "
        "through while the thumb rests on top, which gives control over the tilt of the "
        "body when pouring the contents toward the mouth."
    ),
    ("trigger_sprayer", "use"): (
        "To spray, the index and middle fingers pull the trigger beneath the nozzle while "
        "the palm rests on the head. The trigger is a short curved lever; pulling it drives "
        "the pump that pushes liquid out of the nozzle."
    ),
    ("trigger_sprayer", "hold"): (
        "Hold the sprayer by its body just below the head. The body is a tapered column "
        "that fits the closed hand and sits above the container, so the grip carries the "
        "whole assembly."
    ),
}

PART_DESCRIPTION = {
    ("bottle", "body"): (
        "The body is the largest part of the bottle, a cylinder or gently curved shell that "
        "holds the contents. Its even diameter makes it the main gripping area: the palm "
        "wraps around it and the fingers close on the far side."
    ),
    ("bottle", "lid"): (
        "The lid is a small disc or short cylinder that seals the opening. Its ridged rim is "
        "pinched between thumb and fingertips and twisted or pressed to open and close."
    ),
    ("bottle", "neck"): (
        "The neck is the narrow cylinder between the body and the opening. Its small "
        "diameter suits a pinch or a loose ring grip, which is useful for steering the "
        "bottle while pouring."
    ),
    ("bottle", "rim"): (
        "The rim is the thin raised edge around the opening at the top of the neck. It is "
        "too small for a power grip and is touched only by fingertips when seating the lid."
    ),
    ("bottle", "body surface"): (
        "The body surface is the outer skin of the main section, smooth or ridged. Its "
        "texture sets the friction between the palm and the bottle during a wrap grasp."
    ),
    ("mug", "handle"): (
        "The handle is a curved loop fixed to the side of the mug. Its opening admits the "
        "fingers, and its outer curve rests against them, so the mug can be carried and "
        "tilted without touching the hot body."
    ),
    ("mug", "body"): (
        "The body is the open cylinder that holds the drink. Its outer wall can be wrapped "
        "by the whole hand when it is not too hot."
    ),
}

# vocabulary for synthetic texts about categories without canned entries
SYNTH_SHAPES = ["cylindrical", "rounded", "flat", "tapered", "box-like", "curved", "elongated", "ridged"]
SYNTH_GRIPS = ["wrap the palm around", "pinch with the fingertips", "hook the fingers under",
               "press the thumb against", "cradle in the palm", "squeeze between thumb and fingers"]
SYNTH_ROLES = ["supports the weight of the object", "gives control over its orientation",
               "transmits force to the mechanism", "keeps the hand clear of the contents",
               "lets the object be steered precisely"]
GENERIC_PARTS = ["body", "head", "handle", "base", "neck", "rim", "cap", "surface", "grip", "top"]
