"""Small hand-made associative dg algebras."""
from opmin.samples import associative_algebra


def truncated_odd(ass):
    """Q<x>/(x^3) with |x| = 1 and dx = x^2."""
    one = {("1", y): {y: 1} for y in ("1", "x", "xx")}
    one.update({(y, "1"): {y: 1} for y in ("x", "xx")})
    one[("x", "x")] = {"xx": 1}
    return associative_algebra(ass, {0: ["1"], 1: ["x"], 2: ["xx"]}, one, {"x": {"xx": 1}},
                               unit="1", hi=4, name="Q<x>/x^3")


def triangular(ass):
    """Span of 1, an idempotent e and a degree-1 arrow a with e a = a, a e = 0."""
    mult = {("1", y): {y: 1} for y in ("1", "e", "a")}
    mult.update({("e", "1"): {"e": 1}, ("a", "1"): {"a": 1}, ("e", "e"): {"e": 1}, ("e", "a"): {"a": 1}})
    return associative_algebra(ass, {0: ["1", "e"], 1: ["a"]}, mult, {}, unit="1", hi=3, name="triangular")


def endomorphisms(ass):
    """End(V) for V = Q v0 + Q v1 (degrees 0, 1) with d v0 = v1; acyclic.

    Basis 1, p = E00 (degree 0), u = E10 (degree 1), w = E01 (degree -1).
    """
    mult = {("1", y): {y: 1} for y in ("1", "p", "u", "w")}
    mult.update({(y, "1"): {y: 1} for y in ("p", "u", "w")})
    mult.update({("p", "p"): {"p": 1}, ("u", "p"): {"u": 1}, ("p", "w"): {"w": 1},
                 ("w", "u"): {"p": 1}, ("u", "w"): {"1": 1, "p": -1}})
    d = {"p": {"u": 1}, "w": {"1": 1}}
    return associative_algebra(ass, {-1: ["w"], 0: ["1", "p"], 1: ["u"]}, mult, d, unit="1", hi=3,
                               name="End(V)")


ALL = [truncated_odd, triangular, endomorphisms]
