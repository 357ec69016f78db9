"""Evaluate ring expressions such as ``inv(1+y)*(x + x^2)*y^2``.

Python's own parser does the syntax work (``^`` is read as power); the
walker accepts only +, -, *, ^, integer literals, generator names and
``inv(...)``.  The target "algebra" is anything with add/neg/sub/mul/
power/inverse/from_int/generators, which covers FilteredRing and
SkewPolyRing alike.
"""

from __future__ import annotations

import ast


class ExpressionError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{message}{where}")
        self.position = position


def evaluate(algebra, text: str, names: dict | None = None):
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}", exc.offset) from None
    env = dict(algebra.generators())
    if names:
        env.update(names)
    return _Walker(algebra, env, text).visit(tree.body)


class _Walker:
    def __init__(self, algebra, env, text):
        self.A, self.env, self.text = algebra, env, text

    def fail(self, node, message):
        raise ExpressionError(message, getattr(node, "col_offset", None))

    def visit(self, node):
        A = self.A
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = self._exponent(node.right)
                base = self.visit(node.left)
                if exp < 0:
                    return A.power(A.inverse(base), -exp)
                return A.power(base, exp)
            left, right = self.visit(node.left), self.visit(node.right)
            if isinstance(node.op, ast.Add):
                return A.add(left, right)
            if isinstance(node.op, ast.Sub):
                return A.sub(left, right)
            if isinstance(node.op, ast.Mult):
                return A.mul(left, right)
            self.fail(node, f"unsupported operator {type(node.op).__name__}")
        if isinstance(node, ast.UnaryOp):
            val = self.visit(node.operand)
            if isinstance(node.op, ast.USub):
                return A.neg(val)
            if isinstance(node.op, ast.UAdd):
                return val
            self.fail(node, "unsupported unary operator")
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return A.from_int(node.value)
        if isinstance(node, ast.Name):
            if node.id not in self.env:
                self.fail(node, f"unknown name {node.id!r}")
            return self.env[node.id]
        if isinstance(node, ast.Call):
            if isinstance(node.func, ast.Name) and node.func.id == "inv" and len(node.args) == 1:
                return A.inverse(self.visit(node.args[0]))
            self.fail(node, "only inv(...) may be called")
        self.fail(node, f"unsupported syntax {type(node).__name__}")

    def _exponent(self, node) -> int:
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return node.value
        if (
            isinstance(node, ast.UnaryOp)
            and isinstance(node.op, ast.USub)
            and isinstance(node.operand, ast.Constant)
            and type(node.operand.value) is int
        ):
            return -node.operand.value
        self.fail(node, "exponent must be an integer literal")
