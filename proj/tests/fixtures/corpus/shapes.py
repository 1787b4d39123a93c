"""Module docstring mentioning def fake(): and class Fake: inside a string."""
import os
import collections.abc as cabc
from typing import (
    Any,
    Optional,
)

CONSTANT = 3  # module-level statements are not objects
square = lambda v: v * v


def plain(a, b=2, *args, c: int = 3, **kwargs) -> Optional[int]:
    """Docstring with 'quotes' and \"\"\" escapes."""
    total = a + b + c
    if total > 10:
        return total
    return


def positional_only(x, y, /, z, *, w):
    pass


async def fetch(url: str, *, timeout=1.0):
    async with open_session() as session:
        data = await session.get(url)
    return data


def generator(limit):
    for i in range(limit):
        yield i


def bare_return(flag):
    if flag:
        return
    print("no value")


def nested_outer(n):
    def inner(k):
        return k * 2

    class Local:
        def run(self):
            return inner(1)

    values = [inner(v) for v in range(n)]
    print(values)


class Base(object):
    attr = 1

    def __init__(self, name, size=0):
        self.name = name
        self.size = size

    @property
    def label(self):
        return self.name.upper()

    @staticmethod
    def helper(p, q):
        return p + q

    @classmethod
    def build(cls, name):
        return cls(name)

    def method_no_return(self):
        self.size += 1


@decorator_factory(
    "arg",
    key=1,
)
class Decorated(Base, metaclass=Meta):
    def process(self, items: list[int]) -> dict[str, int]:
        result = {str(i): i for i in items}
        return result

    def continued(self, \
                  first, second):
        text = "line one \
line two"
        return first

    class Inner:
        def deep(self, value):
            def deeper():
                return value
            return deeper


def one_liner(q): return q
def multi_line_string():
    s = """
def not_a_function():
    return 1
"""
    return s


def with_match(command):
    match command:
        case "go":
            return 1
        case _:
            pass


def trailing_comment(x):
    x += 1
    # comment after last statement

# module comment
