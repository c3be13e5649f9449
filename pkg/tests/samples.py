"""Small code samples with known extraction and tokenization results (tabs included)."""

NESTED = (
    "class Foo:\n"
    "  def func1(a, b, c):\n"
    "    return a + b\n"
    "\n"
    "def func2(a, b, c):\n"
    "  if a>b:\n"
    "    return c\n"
    "  return 0\n"
    "\t\t\n"
    "def func3(a):\n"
    "  def func4(b):\n"
    "    return b*2\n"
    "  return func4(3)\n"
)

COMMENTED = (
    "def func1(a, b, c): # example block\n"
    "  if a>b: # condition\n"
    "    return c\n"
    "  else:\n"
    "    return 0\n"
)

COMMENTED_BAG = {
    "def": 1, "func1": 1, "a": 2, "b": 2, "c": 2,
    "if": 1, "return": 2, "else": 1, "0": 1,
}

COMMENT_ONLY = "#define private public\n#include <module>\n"

INIT_TAB = "def __init__(self, connection):\n\tself.connection = connection\n"
INIT_SPACES = "def __init__(self, connection=[]):\n        self.connection = connection\n"
INIT_BAG = {"def": 1, "__init__": 1, "self": 2, "connection": 3}


def numbered_route(n):
    return f"def GET(self):\n    return render.caipu{n}()\n"
