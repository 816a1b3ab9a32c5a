from .cache import DescriptionCache
from .descriptions import (
    DEFAULT_NUM_DESCRIPTIONS,
    DescriptionBundle,
    generate_description,
    generate_description_entry,
    generate_part_labels,
    parse_part_labels,
)
from .encoder import HashTextEncoder, TextEncoder, TokenFeatures, encode_text, tokenize
from .prompts import PROMPT_VERSION, PromptKind, parse_prompt, render_prompt
from .providers import DescriptionProvider, HttpProvider, StubProvider

__all__ = [
    "DEFAULT_NUM_DESCRIPTIONS", "DescriptionBundle", "DescriptionCache", "DescriptionProvider",
    "HashTextEncoder", "HttpProvider", "PROMPT_VERSION", "PromptKind", "StubProvider", "TextEncoder",
    "TokenFeatures", "encode_text", "generate_description", "generate_description_entry",
    "generate_part_labels", "parse_part_labels", "parse_prompt", "render_prompt", "tokenize",
]
