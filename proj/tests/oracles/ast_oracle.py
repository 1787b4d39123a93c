"""Independent oracle: enumerates definitions with CPython's own ast module.

Prints one JSON object per definition: qualified path, name, line span
(decorators included), params (receiver dropped for non-static methods,
constructor params for classes) and the has-return flag (value return or
yield in the own body, nested definitions excluded).
"""
import ast
import json
import sys


def own_body_nodes(node):
    stack = list(node.body)
    while stack:
        cur = stack.pop()
        if isinstance(cur, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef, ast.Lambda)):
            continue
        yield cur
        stack.extend(ast.iter_child_nodes(cur))


def func_returns(fn):
    for n in own_body_nodes(fn):
        if isinstance(n, ast.Return) and n.value is not None:
            return True
        if isinstance(n, (ast.Yield, ast.YieldFrom)):
            return True
    return False


def direct_methods(cls):
    out = []
    stack = list(cls.body)
    while stack:
        cur = stack.pop(0)
        if isinstance(cur, (ast.FunctionDef, ast.AsyncFunctionDef)):
            out.append(cur)
        elif isinstance(cur, ast.ClassDef):
            continue
        else:
            for field in ("body", "orelse", "finalbody", "handlers", "cases"):
                stack.extend(getattr(cur, field, []) or [])
    return out


def param_names(fn):
    a = fn.args
    names = [p.arg for p in a.posonlyargs + a.args]
    if a.vararg:
        names.append(a.vararg.arg)
    names += [p.arg for p in a.kwonlyargs]
    if a.kwarg:
        names.append(a.kwarg.arg)
    return names


def is_static(fn):
    return any(isinstance(d, ast.Name) and d.id == "staticmethod" for d in fn.decorator_list)


def walk(body, prefix, in_class, out):
    stack = list(body)
    ordered = []
    while stack:
        cur = stack.pop(0)
        if isinstance(cur, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            ordered.append(cur)
        else:
            for field in ("body", "orelse", "finalbody", "handlers", "cases"):
                stack[0:0] = getattr(cur, field, []) or []
    for node in ordered:
        start = min([node.lineno] + [d.lineno for d in node.decorator_list])
        path = prefix + [node.name]
        if isinstance(node, ast.ClassDef):
            init = next((m for m in direct_methods(node) if m.name == "__init__"), None)
            params = param_names(init)[1:] if init else []
            ret = any(func_returns(m) for m in direct_methods(node))
            entry = dict(path="/".join(path), name=node.name, span=[start, node.end_lineno],
                         params=params, has_return=ret, kind="Class")
            out.append(entry)
            walk(node.body, path, True, out)
        else:
            params = param_names(node)
            if in_class and params and not is_static(node):
                params = params[1:]
            out.append(dict(path="/".join(path), name=node.name, span=[start, node.end_lineno],
                            params=params, has_return=func_returns(node), kind="Function"))
            walk(node.body, path, False, out)


for filename in sys.argv[1:]:
    tree = ast.parse(open(filename).read())
    out = []
    walk(tree.body, [], False, out)
    for entry in out:
        print(json.dumps(entry))
