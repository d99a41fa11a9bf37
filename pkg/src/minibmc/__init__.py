"""minibmc - a bounded model checker for MiniCxx, a small C++-like language.

The pipeline: source -> tokens -> AST -> template instantiation -> typed
program -> object layouts -> GOTO program -> symbolic execution (SSA
equations + claims) -> bit-vector formula -> verdict.
"""

__version__ = "0.1.0"

__all__ = ["RunOptions", "Verdict", "verify_file", "verify_source"]


def __getattr__(name):
    if name in __all__:
        from minibmc import driver

        return getattr(driver, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
