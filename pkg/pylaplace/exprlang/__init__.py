from pylaplace.exprlang.nodes import Expr, Num, Var, Unary, Binary, evaluate, render
from pylaplace.exprlang.parser import parse, as_expr, tokenize
from pylaplace.exprlang.jet import Jet, jet_eval, derivative
