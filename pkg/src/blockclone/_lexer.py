"""Shared regular expressions for the light-weight Python lexing we need.

Only string literals, comments, brackets and line continuations are
recognised; everything else is opaque text.
"""

import re

_BODY_TRIPLE = r"(?:\\.|[^\\])"
_STRING_ALTERNATIVES = (
    rf"(?P<triple>'''{_BODY_TRIPLE}*?'''|\"\"\"{_BODY_TRIPLE}*?\"\"\")"
    rf"|(?P<triple_open>'''{_BODY_TRIPLE}*|\"\"\"{_BODY_TRIPLE}*)"
    r"|(?P<single>'(?:\\.|[^\\'\n])*'|\"(?:\\.|[^\\\"\n])*\")"
    r"|(?P<single_open>'(?:\\.|[^\\'\n])*|\"(?:\\.|[^\\\"\n])*)"
    r"|(?P<comment>\#[^\n]*)"
)

# strings and comments only
STRING_OR_COMMENT = re.compile(_STRING_ALTERNATIVES, re.DOTALL)

# adds the structural tokens used to find logical line boundaries
STRUCTURE = re.compile(
    _STRING_ALTERNATIVES
    + r"|(?P<open>[(\[{])|(?P<close>[)\]}])|(?P<backslash>\\\n)|(?P<newline>\n)",
    re.DOTALL,
)

UNTERMINATED = ("triple_open", "single_open")
