"""Arabic tweet cleaning: noise, web artefacts, orthography, script filter,
letter elongation, tokenization and stop words.

The steps always run in a fixed order; :class:`NormalizationConfig` only
switches individual steps on or off.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

STEP_NAMES = (
    "strip_noise",
    "strip_web",
    "normalize_arabic",
    "strip_foreign",
    "squeeze_repeats",
    "tokenize",
    "remove_stopwords",
)

# URLs, e-mails, mentions and hashtags survive noise stripping so that
# strip_web can still recognise them.
_URL = r"(?:https?://|www\.)\S+"
_EMAIL = r"[^\s@]+@[^\s@]+\.[^\s@]+"
_MENTION = r"(?<![\w@])@\w+"
_HASHTAG = r"[#\uFF03]\w+"
_PROTECTED_RE = re.compile(f"{_URL}|{_EMAIL}|{_MENTION}|{_HASHTAG}", re.IGNORECASE)

_URL_RE = re.compile(_URL, re.IGNORECASE)
_EMAIL_RE = re.compile(_EMAIL)
_MENTION_RE = re.compile(_MENTION)
_HASH_MARK_RE = re.compile(r"[#\uFF03](?=\w)")
_DIGITS_RE = re.compile(r"\d+")
_SPACES_RE = re.compile(r"\s+")

# alef variants -> bare alef, taa marbuta -> haa, alef maqsura -> yaa
_ALEF_FORMS = str.maketrans({
    "\u0623": "\u0627", "\u0625": "\u0627", "\u0622": "\u0627", "\u0671": "\u0627",
    "\u0629": "\u0647", "\u0649": "\u064A",
})
_DIACRITICS_RE = re.compile(
    "[\u0610-\u061A\u064B-\u065F\u0670\u06D6-\u06DC\u06DF-\u06E8\u06EA-\u06ED\u0640]"
)
_PRESENTATION_RE = re.compile("[\uFB50-\uFDFF\uFE70-\uFEFC]+")
_ARABIC_BLOCKS = ((0x0600, 0x06FF), (0x0750, 0x077F), (0x08A0, 0x08FF))
_EMOJI_EXTRA = {0x200D, 0x20E3} | set(range(0xFE00, 0xFE10))


def _collapse(text: str) -> str:
    return _SPACES_RE.sub(" ", text).strip()


def is_arabic_letter(ch: str) -> bool:
    cp = ord(ch)
    if not any(lo <= cp <= hi for lo, hi in _ARABIC_BLOCKS):
        return False
    return unicodedata.category(ch) == "Lo"


def _is_noise(ch: str) -> bool:
    cat = unicodedata.category(ch)
    # P*: punctuation, S*: symbols and most emoji, Cf: joiners and bidi marks.
    return cat[0] in "PS" or cat == "Cf" or ord(ch) in _EMOJI_EXTRA or 0x1F1E6 <= ord(ch) <= 0x1F1FF


def _strip_noise_span(text: str) -> str:
    return "".join(" " if _is_noise(ch) else ch for ch in text)


def strip_noise(text: str) -> str:
    """Remove emoji, emoticons and punctuation, collapsing whitespace.

    URLs, e-mail addresses, mentions and hashtags are left intact for
    :func:`strip_web`.
    """
    out = []
    pos = 0
    for m in _PROTECTED_RE.finditer(text):
        out.append(_strip_noise_span(text[pos:m.start()]))
        out.append(" " + m.group(0) + " ")
        pos = m.end()
    out.append(_strip_noise_span(text[pos:]))
    return _collapse("".join(out))


def strip_web(text: str) -> str:
    """Drop URLs, e-mails, mentions and digit runs; keep hashtag bodies."""
    text = _URL_RE.sub(" ", text)
    text = _EMAIL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = _HASH_MARK_RE.sub(" ", text)
    text = _DIGITS_RE.sub(" ", text)
    return _collapse(text)


def _fold_presentation_forms(text: str) -> str:
    return _PRESENTATION_RE.sub(lambda m: unicodedata.normalize("NFKC", m.group(0)), text)


def normalize_arabic(text: str) -> str:
    text = _fold_presentation_forms(text)
    text = _DIACRITICS_RE.sub("", text)
    return text.translate(_ALEF_FORMS)


def strip_foreign(text: str) -> str:
    """Keep Arabic-script letters and single spaces only."""
    text = _fold_presentation_forms(text)
    chars = []
    for ch in text:
        if is_arabic_letter(ch):
            chars.append(ch)
        elif unicodedata.category(ch) == "Mn" or ch == "\u0640":
            # combining marks and tatweel sit inside words
            continue
        else:
            chars.append(" ")
    return _collapse("".join(chars))


@lru_cache(maxsize=None)
def _repeat_re() -> re.Pattern:
    letters = "".join(
        chr(cp) for lo, hi in _ARABIC_BLOCKS for cp in range(lo, hi + 1) if is_arabic_letter(chr(cp))
    )
    return re.compile(f"([{re.escape(letters)}])\\1{{2,}}")


def squeeze_repeats(text: str, cap: int = 1) -> str:
    """Shrink every run of three or more identical Arabic letters to ``cap`` copies."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    return _repeat_re().sub(lambda m: m.group(1) * min(cap, len(m.group(0))), text)


def tokenize(text: str) -> list[str]:
    return text.split()


def remove_stopwords(tokens, stopwords) -> list[str]:
    """Drop tokens, and contiguous multi-word phrases, found in ``stopwords``.

    Longer phrases win over shorter ones starting at the same token.
    """
    if not stopwords:
        return list(tokens)
    phrases = {}
    for entry in stopwords:
        parts = tuple(entry.split())
        if parts:
            phrases.setdefault(len(parts), set()).add(parts)
    lengths = sorted(phrases, reverse=True)
    tokens = list(tokens)
    out = []
    i = 0
    while i < len(tokens):
        for n in lengths:
            if tuple(tokens[i:i + n]) in phrases[n]:
                i += n
                break
        else:
            out.append(tokens[i])
            i += 1
    return out


def read_stopwords(path=None) -> list[str]:
    """Read a one-entry-per-line stop-word file; ``#`` starts a comment line.

    Without ``path`` the list shipped with the package is used.  Entries are
    returned as written; :class:`NormalizationConfig` normalizes them.
    """
    if path is None:
        text = resources.files("lahja").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    return entries


@lru_cache(maxsize=1)
def default_stopwords() -> tuple[str, ...]:
    return tuple(read_stopwords())


@dataclass(frozen=True)
class NormalizationConfig:
    """Step switches for :func:`preprocess`.

    ``stopwords`` holds raw entries; they are passed through the same enabled
    character-level steps as the text so that both sides match.
    """

    strip_noise: bool = True
    strip_web: bool = True
    normalize_arabic: bool = True
    strip_foreign: bool = True
    squeeze_repeats: bool = True
    tokenize: bool = True
    remove_stopwords: bool = True
    repeat_cap: int = 1
    stopwords: frozenset = None

    def __post_init__(self):
        if self.repeat_cap < 1:
            raise ValueError("repeat_cap must be >= 1")
        raw = default_stopwords() if self.stopwords is None else self.stopwords
        entries = frozenset(e for e in (" ".join(tokenize(clean_text(s, self))) for s in raw) if e)
        object.__setattr__(self, "stopwords", entries)

    @classmethod
    def raw(cls) -> "NormalizationConfig":
        """Whitespace tokenization only; handy for analytics on pre-cleaned text."""
        return cls(
            strip_noise=False,
            strip_web=False,
            normalize_arabic=False,
            strip_foreign=False,
            squeeze_repeats=False,
            remove_stopwords=False,
            stopwords=frozenset(),
        )

    def to_dict(self) -> dict:
        d = {name: getattr(self, name) for name in STEP_NAMES}
        d["repeat_cap"] = self.repeat_cap
        d["stopwords"] = sorted(self.stopwords)
        return d


@lru_cache(maxsize=1)
def default_config() -> NormalizationConfig:
    return NormalizationConfig()


def clean_text(text: str, config: NormalizationConfig) -> str:
    """Apply the enabled character-level steps (everything before tokenization)."""
    if config.strip_noise:
        text = strip_noise(text)
    if config.strip_web:
        text = strip_web(text)
    if config.normalize_arabic:
        text = normalize_arabic(text)
    if config.strip_foreign:
        text = strip_foreign(text)
    if config.squeeze_repeats:
        text = squeeze_repeats(text, config.repeat_cap)
    return text


def preprocess(text: str, config: NormalizationConfig | None = None) -> list[str]:
    if config is None:
        config = default_config()
    text = clean_text(text, config)
    if config.tokenize:
        tokens = tokenize(text)
    else:
        text = _collapse(text)
        tokens = [text] if text else []
    if config.remove_stopwords:
        tokens = remove_stopwords(tokens, config.stopwords)
    return tokens
